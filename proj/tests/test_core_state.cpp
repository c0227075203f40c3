#include <doctest.h>

#include <cmath>
#include <random>

#include "phasepath/errors.hpp"
#include "phasepath/grid.hpp"
#include "phasepath/wavefunction.hpp"
#include "support/oracle.hpp"

using namespace phasepath;

namespace {

const NaturalUnits kLab = NaturalUnits::from_sigma(0.0309);

// Edges at -4 and 4, cell boundaries on multiples of 0.01 + 0.005 shifted so
// that +-0.5 falls on a boundary.
GridSpec unit_box_grid() { return GridSpec(-4.0 + 0.005, 0.01, 800); }

double l2_distance(const Wavefunction& a, const Wavefunction& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s * a.axis().dx);
}

Wavefunction random_state(const GridSpec& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<complex> amps(grid.n);
    for (auto& a : amps) a = {g(rng), g(rng)};
    Wavefunction raw(grid, Representation::position, amps);
    const double scale = 1.0 / std::sqrt(raw.norm_sq());
    for (auto& a : amps) a *= scale;
    return raw.with_amplitudes(amps);
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(GridSpec(0.0, 0.0, 32), InvalidGrid);
    CHECK_THROWS_AS(GridSpec(0.0, 0.1, 8), InvalidGrid);
    const GridSpec g = GridSpec::centered(0.5, 16);
    CHECK(g.at(8) == doctest::Approx(0.0));
    CHECK(g.coverage(8, -0.125, 0.125) == doctest::Approx(0.5));
    CHECK_THROWS_AS(g.coverage_weights(-10.0, 0.0), IntervalOutsideGrid);
}

TEST_CASE("aligned grid puts both box edges on cell boundaries") {
    const GridSpec g = aligned_grid(kLab.L, kLab.B);
    CHECK(g.n % 2 == 0);
    CHECK(g.dx * 45 == doctest::Approx(kLab.L));
    const GridSpec p = g.conjugate();
    CHECK(p.dx * 45 == doctest::Approx(kLab.B).epsilon(2e-5));
    CHECK_NOTHROW(require_span_for_states(g, kLab.L, kLab.B));
    CHECK_THROWS_AS(require_span_for_states(GridSpec::centered(0.01, 800), kLab.L, kLab.B), GridTooNarrow);
}

TEST_CASE("position box") {
    const Wavefunction l = make_box_position(1.0, unit_box_grid());
    CHECK(l.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(interval_probability(l, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(l.value_at(0.0)) == doctest::Approx(1.0));
    CHECK(std::abs(l.value_at(0.7)) == 0.0);

    // Fractional edges still give a unit discrete norm.
    const Wavefunction f = make_box_position(0.973, GridSpec::centered(0.01, 800));
    CHECK(f.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_box_position(0.015, unit_box_grid()), GridTooCoarse);
    CHECK_THROWS_AS(make_box_position(5.0, unit_box_grid()), GridTooNarrow);
}

TEST_CASE("momentum box") {
    const GridSpec g = aligned_grid(1.0, 1.0, 15, 15);
    const Wavefunction b = make_box_momentum(1.0, g);
    CHECK(b.representation() == Representation::momentum);
    CHECK(std::abs(b.value_at(0.0)) == doctest::Approx(1.0));
    CHECK(b.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    const Wavefunction bx = fourier_transform(b);
    CHECK(bx.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("box overlap against quadrature") {
    const auto ref = oracle::equal_superposition(0.0309);
    const GridSpec g = aligned_grid(kLab.L, kLab.B);
    const Wavefunction l = make_box_position(kLab.L, g);
    const Wavefunction b = fourier_transform(make_box_momentum(kLab.B, g));
    const complex s = overlap_exact(l, b);
    CHECK(s.real() == doctest::Approx(0.175).epsilon(0.003 / 0.175));
    CHECK(s.real() == doctest::Approx(ref.overlap).epsilon(1e-4));
    CHECK(std::abs(s.imag()) < 1e-12);
    CHECK(s.real() > 0.0);

    // Same number from the momentum side.
    const complex sp = overlap_exact(fourier_transform(l), make_box_momentum(kLab.B, g));
    CHECK(std::abs(sp - s) < 1e-12);
}

TEST_CASE("superposition") {
    const GridSpec g = aligned_grid(kLab.L, kLab.B);
    const Wavefunction l = make_box_position(kLab.L, g);
    const Wavefunction b = fourier_transform(make_box_momentum(kLab.B, g));
    const double s = oracle::equal_superposition(0.0309).overlap;

    CHECK(l2_distance(superpose(l, l), l) < 1e-14);
    CHECK(superposition_norm(l, b) == doctest::Approx(1.0 / std::sqrt(2.0 * (1.0 + s))).epsilon(1e-5));
    CHECK(superposition_norm(l, b) == doctest::Approx(0.6522).epsilon(1e-4));
    CHECK(superposition_norm(l, b, pi) == doctest::Approx(1.0 / std::sqrt(2.0 * (1.0 - s))).epsilon(1e-5));
    CHECK(superposition_norm(l, b, pi) == doctest::Approx(0.779).epsilon(1e-3));
    CHECK_THROWS_AS(superpose(l, l, pi), DegenerateSuperposition);
    CHECK(superpose(l, b, 1.3).norm_sq() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(superpose(l, make_box_momentum(kLab.B, g)), GridMismatch);
}

TEST_CASE("Fourier transform") {
    SUBCASE("box transforms to squared sinc") {
        const GridSpec g = aligned_grid(1.0, 2.0 * pi * 0.05, 45, 9);
        const Wavefunction phi = fourier_transform(make_box_position(1.0, g));
        const GridSpec pg = phi.axis();
        for (double p : {0.0, 1.0, 3.0, 7.5, 12.0}) {
            const auto k = static_cast<std::size_t>(std::lround((p - pg.x_min) / pg.dx));
            const double u = pg.at(k) / 2.0;
            const double expected = std::pow(oracle::sinc(u), 2) / (2.0 * pi);
            // Midpoint sampling of the box adds a relative error of about (p dx)^2 / 12.
            const double tol = std::pow(pg.at(k) * g.dx, 2) / 10.0 + 1e-6;
            CHECK(std::norm(phi[k]) == doctest::Approx(expected).epsilon(tol));
        }
    }
    SUBCASE("Gaussian keeps minimum uncertainty") {
        const GridSpec g = GridSpec::centered(0.05, 1024);
        const double sx = 1.3;
        const Wavefunction phi = fourier_transform(make_gaussian(g, sx));
        const GridSpec pg = phi.axis();
        double m2 = 0.0;
        for (std::size_t k = 0; k < pg.n; ++k) m2 += pg.at(k) * pg.at(k) * std::norm(phi[k]) * pg.dx;
        CHECK(std::sqrt(m2) == doctest::Approx(hbar / (2.0 * sx)).epsilon(1e-9));
    }
    SUBCASE("round trip and Parseval on random states") {
        const GridSpec g(-3.17, 0.021, 512);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Wavefunction psi = random_state(g, seed);
            const Wavefunction phi = fourier_transform(psi);
            CHECK(phi.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(l2_distance(fourier_transform(phi), psi) < 1e-12);
            const GridSpec pg = phi.axis();
            CHECK(interval_probability(phi, 0.5 * (pg.lower_edge() + pg.upper_edge()), pg.span()) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("overlap approximation") {
    CHECK(overlap_approx(1.0, 2.0 * pi * 0.0309).value == doctest::Approx(0.1758).epsilon(1e-3));
    CHECK(overlap_approx(1.0, 2.0 * pi * 0.024).value == doctest::Approx(0.1549).epsilon(1e-3));
    CHECK_FALSE(overlap_approx(1.0, 2.0 * pi * 0.05).approximation_warning);
    CHECK(overlap_approx(1.0, 2.0 * pi * 0.2).approximation_warning);

    for (double sigma : {0.001, 0.01, 0.03, 0.05}) {
        CAPTURE(sigma);
        const NaturalUnits u = NaturalUnits::from_sigma(sigma);
        const GridSpec g = aligned_grid(u.L, u.B, 9, 9);
        const double exact = overlap_exact(make_box_position(u.L, g),
                                           fourier_transform(make_box_momentum(u.B, g))).real();
        const double approx = overlap_approx(u.L, u.B).value;
        CHECK(std::abs(approx / exact - 1.0) < 0.05);
        if (sigma <= 0.01) CHECK(std::abs(approx / exact - 1.0) < 2e-3);
    }
}

TEST_CASE("interval probabilities of the superposition") {
    const GridSpec g = aligned_grid(kLab.L, kLab.B);
    const Wavefunction b = fourier_transform(make_box_momentum(kLab.B, g));
    const double B = kLab.B;
    const double pb_ref = oracle::gl([&](double x) { return B / (2.0 * pi) * std::pow(oracle::sinc(B * x / 2), 2); },
                                     -0.5, 0.5);
    CHECK(interval_probability(b, 0.0, 1.0) == doctest::Approx(pb_ref).epsilon(1e-4));
    CHECK(interval_probability(b, 0.0, 1.0) == doctest::Approx(0.031).epsilon(0.002 / 0.031));

    const auto ref = oracle::equal_superposition(0.0309);
    const Wavefunction psi = equal_superposition(kLab, g);
    CHECK(psi.norm_sq() == doctest::Approx(1.0).epsilon(1e-9));
    const double P_L = interval_probability(psi, 0.0, kLab.L);
    const double P_B = interval_probability(psi.in(Representation::momentum), 0.0, kLab.B);
    CHECK(P_L == doctest::Approx(ref.P_L).epsilon(1e-4));
    CHECK(P_L == doctest::Approx(0.588).epsilon(1e-3));
    CHECK(std::abs(P_L - P_B) < 1e-6);
    CHECK_THROWS_AS(interval_probability(psi, 1e4, 1.0), IntervalOutsideGrid);
}
