#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phasepath {

/// One compared quantity: |value - reference| <= tolerance, or a bound when
/// `upper_bound` is set (value <= reference).
struct AcceptanceCheck {
    std::string what;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool upper_bound = false;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<AcceptanceCheck> checks;
    double seconds = 0.0;
    double time_limit_s = 0.0;

    bool within_time() const { return seconds <= time_limit_s; }
    bool pass() const;
};

struct AcceptanceOptions {
    std::uint64_t seed = 7;
    /// Random states in the Wigner identity suite.
    int random_states = 50;
};

CriterionResult criterion_ideal_defect();
CriterionResult criterion_reference_arithmetic();
CriterionResult criterion_negativity_bounds();
CriterionResult criterion_wigner_identities(const AcceptanceOptions& options);
CriterionResult criterion_mixture_consistency();
CriterionResult criterion_analysis_round_trip(const AcceptanceOptions& options);
CriterionResult criterion_lab_mapping();
CriterionResult criterion_envelope_arithmetic();

/// Runs the listed criteria (all eight when empty).
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<int>& which = {});

/// "[PASS] 3 title (0.01 s)" followed by a compact list of the checks.
std::string format_criterion(const CriterionResult& result);

/// JSON array of the results; timings are left out when `with_timing` is
/// false so repeated runs produce identical text.
std::string acceptance_json(const std::vector<CriterionResult>& results, bool with_timing);

}  // namespace phasepath
