#include <doctest.h>

#include <cmath>
#include <random>

#include "phasepath/analysis.hpp"
#include "phasepath/errors.hpp"
#include "phasepath/pipeline.hpp"
#include "support/oracle.hpp"

using namespace phasepath;

namespace {

// Noiseless density sampled every 5 um over +-3000 um.
template <class F>
EstimatedDensity sampled(F f, double error = 1e-7) {
    EstimatedDensity d;
    d.step_um = 5.0;
    for (double x = -3000.0; x <= 3000.0 + 1e-9; x += d.step_um) {
        d.positions_um.push_back(x);
        d.density.push_back(f(x));
        d.error.push_back(error);
    }
    d.net = d.density;
    d.net_error = d.error;
    d.total_net = 1.0;
    d.normalized = true;
    return d;
}

double sinc2(double x, double x0) {
    const double s = oracle::sinc(oracle::pi * x / x0);
    return s * s;
}

// Fraction of the sinc^2 mass inside [-a, a] by composite Simpson.
double simpson_fraction(double x0, double a) {
    const int n = 200000;
    const double h = 2.0 * a / n;
    double s = sinc2(-a, x0) + sinc2(a, x0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * sinc2(-a + i * h, x0);
    return s * h / 3.0 / x0;
}

RunConfig long_dwell(StateKind kind) {
    RunConfig c;
    c.state.kind = kind;
    c.detector.dwell_time_s *= 1000.0;
    c.detector.rng_seed = 21;
    c.analysis.lab = c.lab;
    return c;
}

}  // namespace

TEST_CASE("quasi-probabilities from marginals") {
    const QuasiProbabilities q = quasi_from_marginals(0.5249, 0.6445, 0.0309);
    CHECK(q.w_L == doctest::Approx(0.367).epsilon(2e-3));
    CHECK(q.w_B == doctest::Approx(0.490).epsilon(2e-3));
    CHECK(q.w_inter == doctest::Approx(0.143).epsilon(5e-3));
    CHECK(q.sum() == doctest::Approx(1.0).epsilon(1e-14));

    // Position box alone: P_L = 1, P_B = |<B|L>|^2.
    const double o = 0.03;
    const QuasiProbabilities box = quasi_from_marginals(1.0, o, o);
    CHECK(box.w_L == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(box.w_B) < 1e-12);
    CHECK(std::abs(box.w_inter) < 1e-12);

    CHECK_THROWS_AS(quasi_from_marginals(0.5, 0.5, 1.0), OverlapOutOfRange);
    CHECK_THROWS_AS(quasi_from_marginals(0.5, 0.5, -0.1), OverlapOutOfRange);
}

TEST_CASE("equal superposition weights from its own marginals") {
    const oracle::Superposition sp = oracle::equal_superposition(0.0309);
    const QuasiProbabilities q = quasi_from_marginals(sp.P_L, sp.P_B, sp.overlap * sp.overlap);
    const QuasiProbabilities pure = QuasiProbabilities::pure_superposition(sp.overlap);
    CHECK(q.w_L == doctest::Approx(pure.w_L).epsilon(1e-10));
    CHECK(q.w_B == doctest::Approx(pure.w_B).epsilon(1e-10));
    CHECK(q.w_inter == doctest::Approx(pure.w_inter).epsilon(1e-10));
    CHECK(q.w_L == doctest::Approx(0.4253).epsilon(1e-3));
    CHECK(q.w_inter == doctest::Approx(0.1495).epsilon(1e-3));
}

TEST_CASE("marginal prediction inverts quasi_from_marginals") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double a = u(rng), b = u(rng) * (1.0 - a);
        const QuasiProbabilities q{a, b, 1.0 - a - b};
        const double o = 0.5 * u(rng);
        const MarginalPrediction m = predict_marginals(q, o);
        const QuasiProbabilities back = quasi_from_marginals(m.P_L, m.P_B, o);
        CAPTURE(k);
        CHECK(std::abs(back.w_L - q.w_L) < 1e-12);
        CHECK(std::abs(back.w_B - q.w_B) < 1e-12);
        CHECK(std::abs(back.w_inter - q.w_inter) < 1e-12);
    }
}

TEST_CASE("sinc^2 fraction inside a window") {
    for (double x0 : {500.0, 1620.0, 4000.0}) {
        CAPTURE(x0);
        CHECK(sinc2_fraction(x0, Interval::centered(6000.0)) == doctest::Approx(simpson_fraction(x0, 3000.0)).epsilon(1e-8));
    }
}

TEST_CASE("tail fit recovers a noiseless sinc^2") {
    TailFitOptions opts;
    opts.correct_span = false;
    opts.report_window_sensitivity = false;
    for (double x0 : {500.0, 1000.0, 1620.0, 3000.0, 5000.0}) {
        CAPTURE(x0);
        opts.initial_min_guess = 1.3 * x0;
        const double w = 0.3;
        const SincFit f = fit_sinc_tail(sampled([&](double x) { return w * sinc2(x, x0) / x0; }), opts);
        CHECK(std::abs(f.first_min_location.value / x0 - 1.0) < 1e-3);
        CHECK(std::abs(f.integrated_weight.value / w - 1.0) < 1e-3);
    }
}

TEST_CASE("span correction restores the truncated tail mass") {
    const double x0 = 1620.0;
    const double kappa = simpson_fraction(x0, 3000.0);
    // Scan-normalized: the visible part integrates to one.
    const SincFit f = fit_sinc_tail(sampled([&](double x) { return sinc2(x, x0) / (x0 * kappa); }));
    CHECK(f.span_factor == doctest::Approx(kappa).epsilon(1e-3));
    CHECK(f.integrated_weight.value == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("tail fit failures") {
    EstimatedDensity few = sampled([](double x) { return sinc2(x, 1620.0) / 1620.0; });
    few.positions_um.resize(15);
    few.density.resize(15);
    few.error.resize(15);
    CHECK_THROWS_AS(fit_sinc_tail(few), InsufficientPoints);

    const EstimatedDensity negative = sampled([](double x) { return -sinc2(x, 1620.0) / 1620.0; });
    CHECK_THROWS_AS(fit_sinc_tail(negative), FitDiverged);
}

TEST_CASE("cross terms from measured tail integrals") {
    const QuasiProbabilities q{0.355, 0.493, 0.152};
    const CrossContributions cross{{0.0159, 0.0}, {0.0116, 0.0}};
    const MarginalPrediction m = predict_marginals(q, cross);
    CHECK(m.P_L == doctest::Approx(0.523).epsilon(1e-3));
    CHECK(m.P_B == doctest::Approx(0.657).epsilon(1e-3));
    CHECK(cross.B_in_L.value / q.w_B == doctest::Approx(0.032).epsilon(0.02));
    CHECK(cross.L_in_B.value / q.w_L == doctest::Approx(0.033).epsilon(0.02));
}

TEST_CASE("envelope arithmetic") {
    const EnvelopeQuasi e = quasi_from_envelope(1.718);
    CHECK(e.w_inter == doctest::Approx(0.141).epsilon(1e-9));
    CHECK(e.overlap == doctest::Approx(0.141 / 0.859).epsilon(1e-9));
    CHECK(quasi_from_envelope(2.0).w_inter == 0.0);
    CHECK_THROWS_AS(quasi_from_envelope(0.0), AreaOutOfRange);
    CHECK_THROWS_AS(quasi_from_envelope(2.01), AreaOutOfRange);
}

TEST_CASE("P(M) prediction and interference accounting") {
    const QuasiProbabilities q{0.355, 0.493, 0.152};
    const double s = 0.3617 / 2.0;
    const PMPrediction pm = predict_PM(q, s);
    CHECK(pm.contribution_inter == doctest::Approx(2.0 * s * 0.152).epsilon(1e-12));
    CHECK(pm.contribution_LB == doctest::Approx(2.0 * s * s * 0.848).epsilon(1e-12));
    CHECK(pm.total == doctest::Approx(pm.contribution_inter + pm.contribution_LB).epsilon(1e-15));

    const PMPrediction measured = predict_PM(q, s, {{0.0159, 0.0}, {0.0116, 0.0}});
    CHECK(measured.contribution_LB == doctest::Approx(0.055).epsilon(1e-9));
    CHECK(measured.total == doctest::Approx(0.109978).epsilon(1e-5));
    // Interference weight not seen in P(M).
    const double excess = q.w_inter - measured.contribution_inter;
    CHECK(excess == doctest::Approx(0.097).epsilon(0.01));
    CHECK(excess / q.w_inter == doctest::Approx(0.64).epsilon(0.01));

    CHECK_THROWS_AS(predict_PM(q, 1.0), OverlapOutOfRange);
    CHECK_THROWS_AS(predict_PM(q, -0.01), OverlapOutOfRange);
}

TEST_CASE("envelope of the pure superposition") {
    const RunConfig c = long_dwell(StateKind::pure);
    const ScanRecord scan = simulate_plane(plane_densities(c), Plane::t_M, c.detector, c.span);
    const EnvelopeFit fit = envelope_area(normalize_scan(scan));
    const double s = oracle::equal_superposition(c.lab.sigma()).overlap;
    CHECK(fit.area_S.value == doctest::Approx(2.0 / (1.0 + s)).epsilon(0.02));
    CHECK(fit.maxima_x.size() >= 5);
}

TEST_CASE("no fringes from the momentum box alone") {
    const RunConfig c = long_dwell(StateKind::momentum_box);
    const ScanRecord scan = simulate_plane(plane_densities(c), Plane::t_M, c.detector, c.span);
    CHECK_THROWS_AS(envelope_area(normalize_scan(scan)), NoFringesDetected);
}

TEST_CASE("analysis round trip on simulated scans") {
    const RunConfig c = long_dwell(StateKind::mixture);
    const std::vector<ScanRecord> scans = simulate_planes(plane_densities(c), c.detector, c.span);
    const AnalysisReport r = analyze_scans(scans, c.analysis);
    CHECK(r.identities_hold());
    CHECK(r.decomposition_ok);
    CHECK(r.quasi_fit.w_L == doctest::Approx(0.355).epsilon(0.02 / 0.355));
    CHECK(r.quasi_fit.w_B == doctest::Approx(0.493).epsilon(0.02 / 0.493));
    CHECK(r.quasi_fit.w_inter == doctest::Approx(0.152).epsilon(0.02 / 0.152));
    CHECK(r.violation_certified);
    CHECK(r.defect.value > 0.0);
    CHECK(r.quasi_envelope.w_inter == doctest::Approx(0.152).epsilon(0.03 / 0.152));

    CHECK_THROWS_AS(analyze_scans({scans[0], scans[1]}, c.analysis), MissingPlane);
    CHECK_THROWS_AS(analyze_scans({scans[0], scans[1], scans[1]}, c.analysis), MissingPlane);
}

TEST_CASE("a Gaussian state shows no violation") {
    RunConfig c = long_dwell(StateKind::gaussian);
    c.analysis.strict_fits = false;
    const std::vector<ScanRecord> scans = simulate_planes(plane_densities(c), c.detector, c.span);
    const AnalysisReport r = analyze_scans(scans, c.analysis);
    CHECK(r.defect.value <= 0.0);
    CHECK_FALSE(r.violation_certified);
    CHECK_FALSE(r.negativity_certified);
}
