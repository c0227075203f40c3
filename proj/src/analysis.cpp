#include "phasepath/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "phasepath/errors.hpp"
#include "phasepath/propagation.hpp"

namespace phasepath {
namespace {

constexpr std::size_t kMinTailPoints = 20;
constexpr std::size_t kMinFringes = 5;

double sinc_sq(double x, double x0) {
    const double s = sinc(pi * x / x0);
    return s * s;
}

struct Sinc2Params {
    double x0 = 0.0;
    double h = 0.0;
    std::array<double, 3> cov{};  // var x0, var h, cov x0 h
    double chi2 = 0.0;
    std::size_t dof = 0;
};

double chi2_of(std::span<const double> x, std::span<const double> y, std::span<const double> s, double x0, double h) {
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = (y[i] - h * sinc_sq(x[i], x0)) / s[i];
        c += r * r;
    }
    return c;
}

// Levenberg-Marquardt on (x0, h), started from the best point of a
// logarithmic scan over x0 with h solved linearly.
Sinc2Params fit_sinc2(std::span<const double> x, std::span<const double> y, std::span<const double> s, double guess) {
    if (x.size() < 3) throw InsufficientPoints("sinc^2 fit needs at least three points");
    if (!(guess > 0.0)) throw InvalidArgument("initial first-minimum guess must be positive");

    auto best_h = [&](double x0) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double m = sinc_sq(x[i], x0) / s[i];
            num += m * y[i] / s[i];
            den += m * m;
        }
        return den > 0.0 ? num / den : 0.0;
    };
    double x0 = guess, h = best_h(guess), chi2 = chi2_of(x, y, s, x0, h);
    constexpr int kScan = 400;
    for (int k = 0; k <= kScan; ++k) {
        const double trial = guess * std::pow(10.0, -0.5 + static_cast<double>(k) / kScan);
        const double th = best_h(trial);
        const double c = chi2_of(x, y, s, trial, th);
        if (c < chi2) {
            x0 = trial;
            h = th;
            chi2 = c;
        }
    }

    double lambda = 1e-3;
    std::array<double, 3> A{};  // a00, a11, a01
    auto normal_equations = [&](double px0, double ph, std::array<double, 2>& g) {
        A = {0.0, 0.0, 0.0};
        g = {0.0, 0.0};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = pi * x[i] / px0;
            const double sn = sinc(u);
            const double ds = std::abs(u) > 1e-8 ? (std::cos(u) - sn) / u : 0.0;
            const double j0 = ph * 2.0 * sn * ds * (-u / px0) / s[i];
            const double j1 = sn * sn / s[i];
            const double r = (y[i] - ph * sn * sn) / s[i];
            A[0] += j0 * j0;
            A[1] += j1 * j1;
            A[2] += j0 * j1;
            g[0] += j0 * r;
            g[1] += j1 * r;
        }
    };
    bool converged = false;
    for (int iter = 0; iter < 500 && !converged; ++iter) {
        std::array<double, 2> g{};
        normal_equations(x0, h, g);
        bool accepted = false;
        while (!accepted) {
            const double a00 = A[0] * (1.0 + lambda), a11 = A[1] * (1.0 + lambda), a01 = A[2];
            const double det = a00 * a11 - a01 * a01;
            if (!(std::abs(det) > 0.0) || !std::isfinite(det)) throw FitDiverged("singular normal equations in sinc^2 fit");
            const double d0 = (a11 * g[0] - a01 * g[1]) / det;
            const double d1 = (a00 * g[1] - a01 * g[0]) / det;
            const double nx0 = x0 + d0, nh = h + d1;
            const double c = nx0 > 0.0 ? chi2_of(x, y, s, nx0, nh) : std::numeric_limits<double>::infinity();
            if (c <= chi2) {
                const double change = chi2 - c;
                x0 = nx0;
                h = nh;
                chi2 = c;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (change <= 1e-12 * std::max(chi2, 1e-300) && std::abs(d0) <= 1e-10 * x0) converged = true;
            } else {
                lambda *= 10.0;
                if (lambda > 1e12) {
                    // No downhill step left: already at the minimum.
                    accepted = true;
                    converged = true;
                }
            }
        }
    }
    if (!converged || !std::isfinite(x0) || !std::isfinite(h) || !(x0 > 0.0)) {
        throw FitDiverged("sinc^2 fit did not converge");
    }

    std::array<double, 2> g{};
    normal_equations(x0, h, g);
    const double det = A[0] * A[1] - A[2] * A[2];
    if (!(det > 0.0)) throw FitDiverged("sinc^2 fit has a degenerate curvature matrix");
    Sinc2Params out;
    out.x0 = x0;
    out.h = h;
    out.chi2 = chi2;
    out.dof = x.size() - 2;
    const double scale = std::max(1.0, out.dof > 0 ? chi2 / static_cast<double>(out.dof) : 1.0);
    out.cov = {A[1] / det * scale, A[0] / det * scale, -A[2] / det * scale};
    return out;
}

Interval scan_range(const EstimatedDensity& d) {
    return {d.positions_um.front() - 0.5 * d.step_um, d.positions_um.back() + 0.5 * d.step_um};
}

// Per-point errors with a floor at the smallest positive one, so empty bins
// still carry weight.
std::vector<double> floored_errors(std::span<const double> err) {
    double floor = std::numeric_limits<double>::infinity();
    for (double e : err) {
        if (e > 0.0) floor = std::min(floor, e);
    }
    if (!std::isfinite(floor)) throw InsufficientPoints("density has no positive uncertainties");
    std::vector<double> out(err.begin(), err.end());
    for (auto& e : out) e = std::max(e, floor);
    return out;
}

SincFit tail_fit_core(const EstimatedDensity& density, const TailFitOptions& options) {
    if (density.density.size() != density.positions_um.size() || density.error.size() != density.positions_um.size()) {
        throw InvalidArgument("density, errors and positions differ in length");
    }
    const std::vector<double> err = floored_errors(density.error);
    std::vector<double> x, y, s;
    for (std::size_t i = 0; i < density.positions_um.size(); ++i) {
        if (options.excluded_window.contains(density.positions_um[i])) continue;
        x.push_back(density.positions_um[i]);
        y.push_back(density.density[i]);
        s.push_back(err[i]);
    }
    if (x.size() < kMinTailPoints) {
        throw InsufficientPoints("tail fit needs at least " + std::to_string(kMinTailPoints) + " points outside the window, got " +
                                 std::to_string(x.size()));
    }
    const Sinc2Params p = fit_sinc2(x, y, s, options.initial_min_guess);

    SincFit fit;
    fit.excluded_window = options.excluded_window;
    fit.points = x.size();
    fit.residual_norm = p.dof > 0 ? p.chi2 / static_cast<double>(p.dof) : 0.0;
    double K = 1.0;
    if (options.correct_span) {
        const double raw = p.h * p.x0;
        K = 1.0 / (1.0 + raw * (1.0 - sinc2_fraction(p.x0, scan_range(density))));
    }
    fit.span_factor = K;
    fit.first_min_location = {p.x0, std::sqrt(p.cov[0])};
    fit.peak_height = {p.h * K, std::sqrt(p.cov[1]) * K};
    fit.cov_x0_h = p.cov[2] * K;
    const double w = fit.peak_height.value * p.x0;
    const double var_w = p.x0 * p.x0 * fit.peak_height.error * fit.peak_height.error +
                         fit.peak_height.value * fit.peak_height.value * p.cov[0] +
                         2.0 * p.x0 * fit.peak_height.value * fit.cov_x0_h;
    fit.integrated_weight = {w, std::sqrt(std::max(0.0, var_w))};
    if (!(w >= 0.0 && w <= 1.1)) {
        throw FitDiverged("integrated tail weight " + std::to_string(w) + " outside [0, 1.1]");
    }
    return fit;
}

std::vector<std::size_t> local_maxima(const EstimatedDensity& d, const std::vector<double>& err, const EnvelopeOptions& o) {
    const auto& y = d.density;
    const int n = static_cast<int>(y.size());
    const int k = std::max(1, o.neighborhood);
    std::vector<int> candidates;
    for (int i = k; i < n - k; ++i) {
        if (!(y[i] > 0.0) || y[i] < 3.0 * err[i]) continue;
        bool peak = true;
        for (int j = i - k; j <= i + k && peak; ++j) {
            if (j < i) peak = y[i] > y[j];
            if (j > i) peak = y[i] >= y[j];
        }
        if (peak) candidates.push_back(i);
    }
    // Keep maxima separated from every accepted neighbour by a real dip,
    // visiting the tallest first.
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) { return y[a] > y[b]; });
    std::set<int> accepted;
    auto dip_ok = [&](int a, int b, int lower) {
        const auto [lo, hi] = std::minmax(a, b);
        const double dip = *std::min_element(y.begin() + lo, y.begin() + hi + 1);
        return y[lower] - dip >= std::max(o.min_contrast * y[lower], 3.0 * err[lower]);
    };
    for (int c : candidates) {
        auto right = accepted.lower_bound(c);
        bool ok = true;
        if (right != accepted.end()) ok = dip_ok(c, *right, c);
        if (ok && right != accepted.begin()) ok = dip_ok(*std::prev(right), c, c);
        if (ok) accepted.insert(c);
    }
    std::vector<std::size_t> out;
    for (int i : accepted) out.push_back(static_cast<std::size_t>(i));
    return out;
}

Estimate ratio(const Estimate& a, const Estimate& b) {
    if (!(b.value > 0.0)) return {0.0, 0.0};
    const double r = a.value / b.value;
    const double ra = a.value != 0.0 ? a.error / a.value : 0.0;
    const double rb = b.error / b.value;
    return {r, std::abs(r) * std::sqrt(ra * ra + rb * rb)};
}

IdentityCheck check(std::string name, double residual, double tol) {
    return IdentityCheck{std::move(name), residual, tol, std::abs(residual) <= tol};
}

}  // namespace

QuasiProbabilities quasi_from_marginals(double P_L, double P_B, double overlap_sq) {
    if (!(overlap_sq >= 0.0 && overlap_sq < 1.0)) {
        throw OverlapOutOfRange("overlap_sq must lie in [0, 1), got " + std::to_string(overlap_sq));
    }
    QuasiProbabilities q;
    q.w_L = (1.0 - P_B) / (1.0 - overlap_sq);
    q.w_B = (1.0 - P_L) / (1.0 - overlap_sq);
    q.w_inter = 1.0 - q.w_L - q.w_B;
    return q;
}

double sinc2_fraction(double x0, const Interval& range) {
    if (!(x0 > 0.0)) throw InvalidArgument("first minimum must be positive");
    const double ua = pi * range.lo / x0, ub = pi * range.hi / x0;
    if (ub <= ua) return 0.0;
    auto f = [](double u) {
        const double s = sinc(u);
        return s * s;
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, ua, ub, 20, 1e-12) / pi;
}

double SincFit::model(double x) const { return peak_height.value * sinc_sq(x, first_min_location.value); }

Estimate SincFit::integral(const Interval& range) const {
    const double x0 = first_min_location.value, h = peak_height.value;
    const double value = h * x0 * sinc2_fraction(x0, range);
    const double dx = 1e-6 * x0;
    const double d_x0 = h * ((x0 + dx) * sinc2_fraction(x0 + dx, range) - (x0 - dx) * sinc2_fraction(x0 - dx, range)) / (2.0 * dx);
    const double d_h = x0 * sinc2_fraction(x0, range);
    const double var = d_x0 * d_x0 * first_min_location.error * first_min_location.error +
                       d_h * d_h * peak_height.error * peak_height.error + 2.0 * d_x0 * d_h * cov_x0_h;
    return {value, std::sqrt(std::max(0.0, var))};
}

SincFit fit_sinc_tail(const EstimatedDensity& density, const TailFitOptions& options) {
    SincFit fit = tail_fit_core(density, options);
    if (options.report_window_sensitivity) {
        for (double scale : {0.75, 1.5}) {
            TailFitOptions alt = options;
            alt.excluded_window = {options.excluded_window.lo * scale, options.excluded_window.hi * scale};
            alt.initial_min_guess = fit.first_min_location.value;
            try {
                const SincFit other = tail_fit_core(density, alt);
                fit.window_sensitivity =
                    std::max(fit.window_sensitivity, std::abs(other.first_min_location.value - fit.first_min_location.value));
            } catch (const Error&) {
                // A window that leaves too few points says nothing about stability.
            }
        }
    }
    return fit;
}

CrossContributions cross_contributions(const SincFit& fit_position, const SincFit& fit_momentum,
                                       const Interval& L_interval, const Interval& B_interval) {
    return {fit_position.integral(L_interval), fit_momentum.integral(B_interval)};
}

QuasiProbabilities quasi_from_fits(const SincFit& fit_position, const SincFit& fit_momentum) {
    QuasiProbabilities q;
    q.w_B = fit_position.integrated_weight.value;
    q.w_L = fit_momentum.integrated_weight.value;
    q.w_inter = 1.0 - q.w_L - q.w_B;
    return q;
}

MarginalPrediction predict_marginals(const QuasiProbabilities& q, double overlap_sq) {
    return {q.w_L + q.w_inter + q.w_B * overlap_sq, q.w_B + q.w_inter + q.w_L * overlap_sq};
}

MarginalPrediction predict_marginals(const QuasiProbabilities& q, const CrossContributions& cross) {
    return {q.w_L + q.w_inter + cross.B_in_L.value, q.w_B + q.w_inter + cross.L_in_B.value};
}

EnvelopeFit envelope_area(const EstimatedDensity& density, const EnvelopeOptions& options) {
    const std::vector<double> err = floored_errors(density.error);
    const std::vector<std::size_t> idx = local_maxima(density, err, options);
    if (idx.size() < kMinFringes) {
        throw NoFringesDetected("found " + std::to_string(idx.size()) + " fringe maxima, need at least " +
                                std::to_string(kMinFringes));
    }
    const auto& y = density.density;
    std::vector<double> mx, my, ms;
    for (std::size_t i : idx) {
        double xi = density.positions_um[i], yi = y[i];
        const double curv = y[i - 1] - 2.0 * y[i] + y[i + 1];
        if (curv < 0.0) {
            const double delta = std::clamp(0.5 * (y[i - 1] - y[i + 1]) / curv, -0.5, 0.5);
            xi += delta * density.step_um;
            yi -= 0.25 * (y[i - 1] - y[i + 1]) * delta;
        }
        mx.push_back(xi);
        my.push_back(yi);
        ms.push_back(err[i]);
    }

    EnvelopeFit fit;
    Sinc2Params p;
    for (;;) {
        if (mx.size() < kMinFringes) {
            throw NoFringesDetected("too few fringe maxima remain after outlier rejection");
        }
        p = fit_sinc2(mx, my, ms, options.initial_min_guess);
        std::size_t worst = 0;
        double worst_r = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) {
            const double r = std::abs(my[i] - p.h * sinc_sq(mx[i], p.x0)) / ms[i];
            if (r > worst_r) {
                worst_r = r;
                worst = i;
            }
        }
        const double scale = std::sqrt(std::max(1.0, p.dof > 0 ? p.chi2 / static_cast<double>(p.dof) : 1.0));
        if (worst_r <= options.clip_sigma * scale) break;
        mx.erase(mx.begin() + static_cast<std::ptrdiff_t>(worst));
        my.erase(my.begin() + static_cast<std::ptrdiff_t>(worst));
        ms.erase(ms.begin() + static_cast<std::ptrdiff_t>(worst));
        ++fit.rejected;
    }

    const double S_raw = p.h * p.x0;
    double K = 1.0;
    if (options.correct_span) {
        const double S = S_raw / (1.0 + 0.5 * S_raw * (1.0 - sinc2_fraction(p.x0, scan_range(density))));
        K = S / S_raw;
    }
    fit.span_factor = K;
    fit.first_min_location = {p.x0, std::sqrt(p.cov[0])};
    fit.height = {p.h * K, std::sqrt(p.cov[1]) * K};
    const double var_S = p.x0 * p.x0 * p.cov[1] + p.h * p.h * p.cov[0] + 2.0 * p.x0 * p.h * p.cov[2];
    fit.area_S = {S_raw * K, std::sqrt(std::max(0.0, var_S)) * K};
    fit.residual_norm = p.dof > 0 ? p.chi2 / static_cast<double>(p.dof) : 0.0;
    fit.maxima_x = std::move(mx);
    fit.maxima_y = std::move(my);
    if (!(fit.area_S.value > 0.0)) throw FitDiverged("envelope area is not positive");
    return fit;
}

EnvelopeQuasi quasi_from_envelope(double area_S) {
    if (!(area_S > 0.0 && area_S <= 2.0)) {
        throw AreaOutOfRange("envelope area must lie in (0, 2], got " + std::to_string(area_S));
    }
    const double w_inter = 1.0 - 0.5 * area_S;
    return {w_inter, w_inter / (0.5 * area_S)};
}

EnvelopeQuasi quasi_from_envelope(const EnvelopeFit& fit) { return quasi_from_envelope(fit.area_S.value); }

PMPrediction predict_PM(const QuasiProbabilities& q, double overlap) {
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw OverlapOutOfRange("overlap must lie in [0, 1), got " + std::to_string(overlap));
    }
    PMPrediction r;
    r.contribution_LB = 2.0 * overlap * overlap * (q.w_L + q.w_B);
    r.contribution_inter = 2.0 * overlap * q.w_inter;
    r.total = r.contribution_LB + r.contribution_inter;
    return r;
}

PMPrediction predict_PM(const QuasiProbabilities& q, double overlap, const CrossContributions& cross) {
    PMPrediction r = predict_PM(q, overlap);
    r.contribution_LB = 2.0 * (cross.B_in_L.value + cross.L_in_B.value);
    r.total = r.contribution_LB + r.contribution_inter;
    return r;
}

bool AnalysisReport::identities_hold() const {
    return std::all_of(identities.begin(), identities.end(), [](const IdentityCheck& c) { return c.ok; });
}

namespace {

// Tail fits, cross terms, envelope and the P_M decomposition.
void decompose(AnalysisReport& r, const ScanRecord& pos, const ScanRecord& mom, const ScanRecord& mid,
               const AnalysisConfig& config) {
    try {
        r.fit_position = fit_sinc_tail(normalize_scan(pos), config.tail);
    } catch (const FitDiverged& e) {
        throw FitDiverged(std::string("position-plane tail fit: ") + e.what());
    }
    try {
        r.fit_momentum = fit_sinc_tail(normalize_scan(mom), config.tail);
    } catch (const FitDiverged& e) {
        throw FitDiverged(std::string("momentum-plane tail fit: ") + e.what());
    }
    r.cross = cross_contributions(r.fit_position, r.fit_momentum, Interval::centered(config.L_um),
                                  Interval::centered(config.B_um));
    r.quasi_fit = quasi_from_fits(r.fit_position, r.fit_momentum);
    r.overlap_sq_position = ratio(r.cross.B_in_L, r.fit_position.integrated_weight);
    r.overlap_sq_momentum = ratio(r.cross.L_in_B, r.fit_momentum.integrated_weight);
    r.predicted = predict_marginals(r.quasi_fit, r.cross);
    r.predicted_in_scan = {r.predicted.P_L / r.fit_position.span_factor, r.predicted.P_B / r.fit_momentum.span_factor};

    try {
        r.envelope = envelope_area(normalize_scan(mid), config.envelope);
    } catch (const FitDiverged& e) {
        throw FitDiverged(std::string("envelope fit at t_M: ") + e.what());
    }
    r.quasi_envelope = quasi_from_envelope(r.envelope);
    const double overlap_fit = std::sqrt(std::max(0.0, 0.5 * (r.overlap_sq_position.value + r.overlap_sq_momentum.value)));
    r.pm_fit = predict_PM(r.quasi_fit, overlap_fit);
    r.pm_measured = predict_PM(r.quasi_fit, overlap_fit, r.cross);
    r.interference_excess = r.quasi_fit.w_inter - r.pm_fit.contribution_inter;
    r.interference_fraction = r.quasi_fit.w_inter != 0.0 ? r.interference_excess / r.quasi_fit.w_inter : 0.0;
}

}  // namespace

AnalysisReport analyze_scans(const std::vector<ScanRecord>& scans, const AnalysisConfig& config) {
    std::map<Plane, const ScanRecord*> by_plane;
    for (const auto& s : scans) {
        if (!by_plane.emplace(s.plane, &s).second) throw MissingPlane("plane " + plane_label(s.plane) + " appears twice");
    }
    for (Plane p : {Plane::t0_position, Plane::t0_momentum, Plane::t_M}) {
        if (!by_plane.count(p)) throw MissingPlane("no scan for plane " + plane_label(p));
    }
    const ScanRecord& pos = *by_plane[Plane::t0_position];
    const ScanRecord& mom = *by_plane[Plane::t0_momentum];
    const ScanRecord& mid = *by_plane[Plane::t_M];

    AnalysisReport r;
    r.P_L = interval_probability_from_scan(pos, 0.0, config.L_um);
    r.P_B = interval_probability_from_scan(mom, 0.0, config.B_um);
    r.P_M = interval_probability_from_scan(mid, 0.0, config.M_um);

    config.lab.validate();
    const NaturalUnits slit = config.lab.natural();
    const double d_um = config.lab.slit_width_d * 1e6;
    const double L_nat = config.L_um / d_um;
    const double B_nat = config.B_um / d_um * slit.B;
    const double t_M = slit.t_M();
    if (std::abs(L_nat + B_nat * t_M / mass - config.M_um / d_um) > 1e-9 * config.M_um / d_um) {
        throw InconsistentGeometry("M interval does not equal L + B t_M / m");
    }
    const PropagationTriple triple = PropagationTriple::make(r.P_L.value, r.P_B.value, r.P_M.value, L_nat, B_nat, t_M);
    r.defect = defect_with_uncertainty(triple, r.P_L.error, r.P_B.error, r.P_M.error);
    r.minimal_joint = minimal_joint_probability(r.P_L.value, r.P_B.value);
    r.quasi_marginal = quasi_from_marginals(r.P_L.value, r.P_B.value, config.nominal_overlap_sq);

    r.sigma_intervals = L_nat * B_nat / (2.0 * pi * hbar);
    r.bounds = bound_report(triple);
    const double joint_error = std::hypot(r.P_L.error, r.P_B.error);
    r.violation_certified = r.defect.value - config.certify_sigma * r.defect.error > 0.0;
    r.negativity_certified = r.bounds.W_out + config.certify_sigma * joint_error < 0.0;

    const MarginalPrediction back = predict_marginals(r.quasi_marginal, config.nominal_overlap_sq);
    r.identities.push_back(check("marginal_round_trip_L", back.P_L - r.P_L.value, 1e-12));
    r.identities.push_back(check("marginal_round_trip_B", back.P_B - r.P_B.value, 1e-12));
    r.identities.push_back(check("wigner_total", r.bounds.W_in + r.bounds.W_out - 1.0, 1e-12));
    r.identities.push_back(check("wigner_defect", r.defect.value + r.bounds.W_out + r.bounds.W_diag, 1e-12));

    try {
        decompose(r, pos, mom, mid, config);
    } catch (const Error& e) {
        if (config.strict_fits) throw;
        r.decomposition_ok = false;
        r.decomposition_error = e.what();
        return r;
    }
    r.decomposition_ok = true;
    r.identities.push_back(check("quasi_fit_sum", r.quasi_fit.sum() - 1.0, 1e-9));
    r.identities.push_back(check("joint_from_quasi", (r.predicted.P_L + r.predicted.P_B - 1.0) -
                                                          (r.quasi_fit.w_inter + r.cross.B_in_L.value + r.cross.L_in_B.value),
                                 1e-9));
    r.identities.push_back(check("pm_decomposition", r.pm_fit.total - r.pm_fit.contribution_LB - r.pm_fit.contribution_inter, 1e-15));
    return r;
}

namespace {

nlohmann::json est(const Estimate& e) { return {{"value", e.value}, {"error", e.error}}; }
nlohmann::json est(const ScanProbability& e) { return {{"value", e.value}, {"error", e.error}}; }
nlohmann::json quasi(const QuasiProbabilities& q) { return {{"w_L", q.w_L}, {"w_B", q.w_B}, {"w_inter", q.w_inter}}; }

nlohmann::json sinc_fit(const SincFit& f) {
    return {{"first_min_um", est(f.first_min_location)},
            {"peak_height_per_um", est(f.peak_height)},
            {"integrated_weight", est(f.integrated_weight)},
            {"excluded_window_um", {f.excluded_window.lo, f.excluded_window.hi}},
            {"chi2_per_dof", f.residual_norm},
            {"points", f.points},
            {"span_factor", f.span_factor},
            {"window_sensitivity_um", f.window_sensitivity},
            {"error_model", "local quadratic, scaled by max(1, chi2/dof)"}};
}

}  // namespace

std::string report_to_json(const AnalysisReport& r) {
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& c : r.identities) {
        ids.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"ok", c.ok}});
    }
    const RegionReport& b = r.bounds;
    nlohmann::json j = {
        {"measured", {{"P_L", est(r.P_L)}, {"P_B", est(r.P_B)}, {"P_M", est(r.P_M)}}},
        {"defect", est(r.defect)},
        {"minimal_joint", r.minimal_joint},
        {"violation_certified", r.violation_certified},
        {"negativity_certified", r.negativity_certified},
        {"quasi_from_marginals", quasi(r.quasi_marginal)},
        {"sigma_intervals", r.sigma_intervals},
        {"wigner_bounds",
         {{"W_LB_max", b.W_LB}, {"W_out_max", b.W_out}, {"W_diag_min", b.W_diag}, {"W_in_min", b.W_in}}},
        {"identities", ids},
        {"identities_hold", r.identities_hold()}};
    if (!r.decomposition_ok) {
        j["decomposition"] = nullptr;
        j["decomposition_error"] = r.decomposition_error;
        return j.dump(2);
    }
    j["decomposition"] = {
        {"tail_fit_position", sinc_fit(r.fit_position)},
        {"tail_fit_momentum", sinc_fit(r.fit_momentum)},
        {"cross", {{"wB_overlap_sq", est(r.cross.B_in_L)}, {"wL_overlap_sq", est(r.cross.L_in_B)}}},
        {"quasi_from_fits", quasi(r.quasi_fit)},
        {"overlap_sq_position", est(r.overlap_sq_position)},
        {"overlap_sq_momentum", est(r.overlap_sq_momentum)},
        {"predicted", {{"P_L", r.predicted.P_L}, {"P_B", r.predicted.P_B}}},
        {"predicted_scan_normalized", {{"P_L", r.predicted_in_scan.P_L}, {"P_B", r.predicted_in_scan.P_B}}},
        {"envelope",
         {{"area_S", est(r.envelope.area_S)},
          {"height_per_um", est(r.envelope.height)},
          {"first_min_um", est(r.envelope.first_min_location)},
          {"chi2_per_dof", r.envelope.residual_norm},
          {"span_factor", r.envelope.span_factor},
          {"maxima_used", r.envelope.maxima_x.size()},
          {"maxima_rejected", r.envelope.rejected},
          {"w_inter", r.quasi_envelope.w_inter},
          {"overlap", r.quasi_envelope.overlap}}},
        {"P_M_prediction",
         {{"total", r.pm_fit.total},
          {"states", r.pm_fit.contribution_LB},
          {"interference", r.pm_fit.contribution_inter},
          {"total_with_measured_states", r.pm_measured.total},
          {"measured_states", r.pm_measured.contribution_LB}}},
        {"interference_excess", r.interference_excess},
        {"interference_fraction", r.interference_fraction}};
    return j.dump(2);
}

}  // namespace phasepath
