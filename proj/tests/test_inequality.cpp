#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "phasepath/errors.hpp"
#include "phasepath/inequality.hpp"
#include "phasepath/propagation.hpp"
#include "support/oracle.hpp"
#include "support/states.hpp"

using namespace phasepath;

namespace {

const NaturalUnits kLab = NaturalUnits::from_sigma(0.0309);

// Reconstructed-state geometry: 55 um intervals, LB = 0.037 (2 pi hbar).
PropagationTriple reference_triple() {
    const double L = 1.1;
    const double B = 0.037 * 2.0 * pi * hbar / L;
    return PropagationTriple::make(0.5249, 0.6445, 0.1092, L, B, L / B);
}

}  // namespace

TEST_CASE("minimal joint probability") {
    CHECK(minimal_joint_probability(0.5249, 0.6445) == doctest::Approx(0.1694).epsilon(1e-9));
    CHECK(minimal_joint_probability(0.3, 0.3) == 0.0);
    CHECK(minimal_joint_probability(1.0, 0.42) == doctest::Approx(0.42));
    CHECK_THROWS_AS(minimal_joint_probability(-0.1, 0.5), InvalidArgument);
}

TEST_CASE("defect probability") {
    CHECK(defect_probability(reference_triple()) == doctest::Approx(0.0602).epsilon(1e-9));
    CHECK(defect_probability(PropagationTriple::make(0.5, 0.5, 0.2, kLab)) == doctest::Approx(-0.2));
    const PropagationTriple t = PropagationTriple::make(0.5, 0.5, 0.2, 1.0, 2.0, 0.25);
    CHECK(t.M == doctest::Approx(1.5));
    CHECK_THROWS_AS(PropagationTriple::make(1.5, 0.5, 0.2, kLab), InvalidArgument);

    const Estimate e = defect_with_uncertainty(reference_triple(), 0.0007, 0.0007, 0.0002);
    CHECK(e.error == doctest::Approx(std::sqrt(2 * 0.0007 * 0.0007 + 0.0002 * 0.0002)));
}

TEST_CASE("ideal defect from grid propagation matches quadrature") {
    for (double sigma : {0.0309, 0.024}) {
        CAPTURE(sigma);
        const auto ref = oracle::equal_superposition(sigma);
        const PropagationTriple t = ideal_triple(NaturalUnits::from_sigma(sigma));
        CHECK(t.P_L == doctest::Approx(ref.P_L).epsilon(1e-4));
        CHECK(t.P_M == doctest::Approx(ref.P_M).epsilon(3e-4));
        CHECK(defect_probability(t) == doctest::Approx(ref.defect()).epsilon(1e-3));
    }
}

TEST_CASE("swapping the roles of L and B leaves the defect unchanged") {
    // Same sigma with the widths exchanged: L' = B, B' = L.
    const NaturalUnits swapped{kLab.B, kLab.L};
    const double d1 = defect_probability(ideal_triple(kLab));
    const double d2 = defect_probability(ideal_triple(swapped));
    CHECK(std::abs(d1 - d2) < 1e-6);
}

TEST_CASE("Wigner consistency") {
    SUBCASE("bounds from the reference probabilities") {
        const PropagationTriple t = reference_triple();
        const RegionReport r = bound_report(t);
        const WignerConsistency c = wigner_consistency(t, r);
        CHECK(c.consistent);
        CHECK(r.W_out + r.W_diag == doctest::Approx(-0.0602).epsilon(1e-9));
        CHECK(r.W_LB == doctest::Approx(0.074).epsilon(1e-9));
        CHECK(r.W_diag == doctest::Approx(0.0352).epsilon(1e-9));
        CHECK(r.W_out == doctest::Approx(-0.0954).epsilon(1e-9));
    }
    SUBCASE("grid states") {
        const BoxPair boxes = BoxPair::make(kLab, support::wigner_grid(kLab));
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 3; ++trial) {
            const Wavefunction psi = support::random_superposition(boxes, rng);
            const RegionReport r = region_integrals(wigner_from_pure(psi), kLab.L, kLab.B, kLab.t_M());
            const PropagationTriple t = PropagationTriple::make(
                interval_probability(psi, 0.0, kLab.L), interval_probability(psi.in(Representation::momentum), 0.0, kLab.B),
                interval_probability(propagate_free(psi, kLab.t_M()), 0.0, kLab.M()), kLab);
            CHECK(wigner_consistency(t, r).consistent);
        }
    }
    SUBCASE("Gaussian state") {
        const GridSpec g = support::wigner_grid(kLab);
        const Wavefunction psi = make_gaussian(g, 0.8, 0.3);
        const RegionReport r = region_integrals(wigner_from_pure(psi), kLab.L, kLab.B, kLab.t_M());
        const WignerConsistency c = wigner_consistency(triple_from_report(r), r);
        CHECK(c.defect <= 0.0);
        CHECK(r.W_out >= -1e-6);
        CHECK(r.W_diag >= -1e-6);
    }
    SUBCASE("geometry mismatch") {
        RegionReport r = bound_report(reference_triple());
        r.L *= 1.01;
        CHECK_THROWS_AS(wigner_consistency(reference_triple(), r), InconsistentGeometry);
    }
}

TEST_CASE("defect sweep") {
    std::vector<double> sigmas;
    for (double s = 0.005; s <= 0.1 + 1e-12; s += 0.005) sigmas.push_back(s);
    const SweepResult sweep = defect_sweep(sigmas, 9, 17);
    for (const auto& p : sweep.points) {
        CAPTURE(p.sigma);
        CHECK(p.defect > 0.0);
    }
    // Location of the maximum from a fine quadrature scan.
    double best = 0.0, best_sigma = 0.0;
    for (double s = 0.02; s <= 0.045; s += 0.0005) {
        const double d = oracle::equal_superposition(s).defect();
        if (d > best) best = d, best_sigma = s;
    }
    CHECK(sweep.sigma_at_max == doctest::Approx(best_sigma).epsilon(0.0025 / best_sigma));
    CHECK(sweep.max_defect == doctest::Approx(best).epsilon(1e-3 / best));
}
