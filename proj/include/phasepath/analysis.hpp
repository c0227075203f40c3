#pragma once

#include <string>
#include <vector>

#include "phasepath/detector.hpp"
#include "phasepath/inequality.hpp"
#include "phasepath/mixture.hpp"
#include "phasepath/units.hpp"

namespace phasepath {

/// Closed interval on a lab axis, micrometres.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval centered(double width) { return {-0.5 * width, 0.5 * width}; }
    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Weights from P_L, P_B and an assumed |<B|L>|^2. Throws OverlapOutOfRange
/// unless overlap_sq is in [0, 1).
QuasiProbabilities quasi_from_marginals(double P_L, double P_B, double overlap_sq);

/// Fraction of the mass of sinc^2(pi x / x0) / x0 inside [a, b].
double sinc2_fraction(double x0, const Interval& range);

/// Weighted fit of h sinc^2(pi x / x0) to a diffraction tail.
struct SincFit {
    Estimate first_min_location;  ///< x0, um
    Estimate peak_height;         ///< h, per um
    Estimate integrated_weight;   ///< h x0
    double cov_x0_h = 0.0;
    Interval excluded_window;
    double residual_norm = 0.0;  ///< chi^2 per degree of freedom
    std::size_t points = 0;
    /// Scan-normalized values are multiplied by this to undo the sinc^2 mass
    /// that falls outside the scan; 1 when uncorrected.
    double span_factor = 1.0;
    /// Largest shift of x0 when the excluded window is scaled by 0.75 or 1.5.
    double window_sensitivity = 0.0;

    double model(double x) const;
    /// Integral of the fitted sinc^2 over `range`, with its error.
    Estimate integral(const Interval& range) const;
};

struct TailFitOptions {
    Interval excluded_window{-300.0, 300.0};
    double initial_min_guess = 1620.0;
    /// Rescale for the tail mass outside the scanned range.
    bool correct_span = true;
    bool report_window_sensitivity = true;
};

/// Damped Gauss-Newton fit over the points outside the excluded window,
/// seeded by a coarse scan over x0. Errors come from the curvature of the
/// objective, scaled by max(1, chi^2 per degree of freedom). Throws
/// InsufficientPoints with fewer than 20 usable points and FitDiverged when
/// the iteration fails or leaves the physical range.
SincFit fit_sinc_tail(const EstimatedDensity& density, const TailFitOptions& options = {});

struct CrossContributions {
    Estimate B_in_L;  ///< w_B |<B|L>|^2 from the position tail
    Estimate L_in_B;  ///< w_L |<B|L>|^2 from the momentum tail
};

/// Integrates each fitted tail across the central interval it was excluded from.
CrossContributions cross_contributions(const SincFit& fit_position, const SincFit& fit_momentum,
                                       const Interval& L_interval, const Interval& B_interval);

/// Weights from the two tail fits: w_B from the position tail, w_L from the
/// momentum tail, w_inter from normalization.
QuasiProbabilities quasi_from_fits(const SincFit& fit_position, const SincFit& fit_momentum);

struct MarginalPrediction {
    double P_L = 0.0;
    double P_B = 0.0;
};

/// P_L = w_L + w_inter + w_B overlap_sq, and the mirror image for P_B.
MarginalPrediction predict_marginals(const QuasiProbabilities& q, double overlap_sq);
/// Same with the cross terms taken from the tail integrals.
MarginalPrediction predict_marginals(const QuasiProbabilities& q, const CrossContributions& cross);

/// Squared-sinc envelope through the fringe maxima at t_M.
struct EnvelopeFit {
    Estimate area_S;
    Estimate height;              ///< per um
    Estimate first_min_location;  ///< um
    double residual_norm = 0.0;
    double span_factor = 1.0;
    std::vector<double> maxima_x;  ///< accepted maxima, um
    std::vector<double> maxima_y;  ///< per um
    std::size_t rejected = 0;
};

struct EnvelopeOptions {
    /// A maximum must dominate this many points on each side.
    int neighborhood = 2;
    /// Required dip between neighbouring maxima, relative to the lower one.
    double min_contrast = 0.5;
    double clip_sigma = 3.0;
    double initial_min_guess = 1620.0;
    bool correct_span = true;
};

/// Area S of the fitted envelope of a unit-normalized density. Throws
/// NoFringesDetected with fewer than five fringe maxima.
EnvelopeFit envelope_area(const EstimatedDensity& density, const EnvelopeOptions& options = {});

struct EnvelopeQuasi {
    double w_inter = 0.0;
    double overlap = 0.0;  ///< |<B|L>|
};

/// w_inter = 1 - S/2 and |<B|L>| = w_inter / (S/2), assuming unit
/// visibility. Throws AreaOutOfRange unless S is in (0, 2].
EnvelopeQuasi quasi_from_envelope(double area_S);
EnvelopeQuasi quasi_from_envelope(const EnvelopeFit& fit);

struct PMPrediction {
    double total = 0.0;
    double contribution_LB = 0.0;
    double contribution_inter = 0.0;
};

/// 2 |<B|L>|^2 (w_L + w_B) + 2 |<B|L>| w_inter. Throws OverlapOutOfRange
/// unless the overlap is in [0, 1).
PMPrediction predict_PM(const QuasiProbabilities& q, double overlap);
/// State part taken as twice the measured cross contributions.
PMPrediction predict_PM(const QuasiProbabilities& q, double overlap, const CrossContributions& cross);

struct AnalysisConfig {
    LabParams lab;
    double L_um = 55.0;
    double B_um = 55.0;  ///< momentum interval in focal-plane micrometres
    double M_um = 110.0;
    double nominal_overlap_sq = 0.0309;
    TailFitOptions tail;
    EnvelopeOptions envelope;
    /// When false, a failed tail or envelope fit is recorded in the report
    /// instead of thrown; the measured probabilities and bounds remain.
    bool strict_fits = true;
    /// Significance, in standard errors, required to certify a violation.
    double certify_sigma = 3.0;
};

struct IdentityCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool ok = false;
};

struct AnalysisReport {
    ScanProbability P_L, P_B, P_M;
    Estimate defect;
    double minimal_joint = 0.0;
    QuasiProbabilities quasi_marginal;  ///< from P_L, P_B and the nominal overlap
    bool violation_certified = false;   ///< defect above zero by certify_sigma errors
    bool negativity_certified = false;  ///< W_out bound below zero by certify_sigma errors

    /// False when a fit failed under strict_fits = false; the fields below
    /// are then unset.
    bool decomposition_ok = false;
    std::string decomposition_error;

    SincFit fit_position;
    SincFit fit_momentum;
    CrossContributions cross;
    QuasiProbabilities quasi_fit;
    Estimate overlap_sq_position;  ///< cross / weight, position tail
    Estimate overlap_sq_momentum;
    MarginalPrediction predicted;  ///< true normalization
    MarginalPrediction predicted_in_scan;  ///< rescaled to the scan normalization of P_L, P_B

    EnvelopeFit envelope;
    EnvelopeQuasi quasi_envelope;
    PMPrediction pm_fit;       ///< fitted weights, overlap from the tail fits
    PMPrediction pm_measured;  ///< state part from the cross contributions
    double interference_excess = 0.0;   ///< w_inter - interference share of P_M
    double interference_fraction = 0.0; ///< excess / w_inter

    double sigma_intervals = 0.0;  ///< LB / (2 pi hbar) of the detection intervals
    RegionReport bounds;

    std::vector<IdentityCheck> identities;
    bool identities_hold() const;
};

/// Full chain on one scan per plane. Throws MissingPlane unless each plane
/// appears exactly once, and fit errors with the plane as context when
/// strict_fits is set.
AnalysisReport analyze_scans(const std::vector<ScanRecord>& scans, const AnalysisConfig& config = {});

/// JSON rendering of the report, units in the key names.
std::string report_to_json(const AnalysisReport& report);

}  // namespace phasepath
