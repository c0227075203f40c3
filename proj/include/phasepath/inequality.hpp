#pragma once

#include <span>
#include <vector>

#include "phasepath/grid.hpp"
#include "phasepath/units.hpp"
#include "phasepath/wigner.hpp"

namespace phasepath {

/// Probabilities of the three straight-line tests with their geometry.
struct PropagationTriple {
    double P_L = 0.0;
    double P_B = 0.0;
    double P_M = 0.0;
    double L = 1.0;
    double B = 1.0;
    double t_M = 1.0;
    double M = 2.0;

    /// Validates the probabilities and sets M = L + B t_M / m.
    static PropagationTriple make(double P_L, double P_B, double P_M, double L, double B, double t_M);
    /// Triple with the natural geometry of `units`.
    static PropagationTriple make(double P_L, double P_B, double P_M, const NaturalUnits& units);
};

/// max(0, P_L + P_B - 1).
double minimal_joint_probability(double P_L, double P_B);

/// P_L + P_B - 1 - P_M; positive values violate the straight-line bound.
double defect_probability(const PropagationTriple& triple);

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Defect with independent input errors added in quadrature.
Estimate defect_with_uncertainty(const PropagationTriple& triple, double err_L, double err_B, double err_M);

struct WignerConsistency {
    double defect = 0.0;
    double wigner_defect = 0.0;  ///< -(W_out + W_diag)
    double difference = 0.0;
    bool consistent = false;
};

/// Compares the direct defect with -(W_out + W_diag). Throws
/// InconsistentGeometry when L, B or t_M differ.
WignerConsistency wigner_consistency(const PropagationTriple& triple, const RegionReport& report, double tol = 1e-6);

PropagationTriple triple_from_report(const RegionReport& report);

/// Region report implied by measured probabilities when W_LB takes its
/// largest allowed value LB/(pi hbar): W_out is then an upper bound and
/// W_diag a lower bound.
RegionReport bound_report(const PropagationTriple& triple);

/// Triple of the equal superposition, propagated on `grid`.
PropagationTriple ideal_triple(const NaturalUnits& units, const GridSpec& grid);
/// Same on the default aligned grid.
PropagationTriple ideal_triple(const NaturalUnits& units);

struct SweepPoint {
    double sigma = 0.0;
    double defect = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    double sigma_at_max = 0.0;
    double max_defect = 0.0;
};

/// Ideal defect for each sigma (L = 1); the maximum is refined by a
/// parabola through the best sample and its neighbours.
SweepResult defect_sweep(std::span<const double> sigmas, int cells_in_L = 45, int cells_in_B = 45);

}  // namespace phasepath
