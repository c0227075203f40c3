#pragma once

// Continuum reference values for the box superposition, computed by
// Gauss-Legendre quadrature directly in x and p. Nothing here touches the
// FFT path of the library.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

struct Superposition {
    double overlap;
    double P_L;
    double P_B;
    double P_M;
    double defect() const { return P_L + P_B - 1.0 - P_M; }
};

template <class F>
auto gl(F f, double a, double b) {
    return boost::math::quadrature::gauss<double, 150>::integrate(f, a, b);
}

inline double sinc(double u) { return std::abs(u) < 1e-12 ? 1.0 : std::sin(u) / u; }

/// Equal superposition of the position box (width L = 1) and the momentum
/// box (width B = 2 pi sigma), hbar = m = 1, evaluated at t_M = L/B.
inline Superposition equal_superposition(double sigma) {
    const double L = 1.0;
    const double B = 2.0 * pi * sigma;
    const double t = L / B;
    const double s = gl([&](double x) { return std::sqrt(B / (2.0 * pi)) * sinc(B * x / 2.0); }, -L / 2, L / 2) /
                     std::sqrt(L);
    const double P_L = 0.5 * (1.0 + s);
    using C = std::complex<double>;
    const C i{0.0, 1.0};
    auto psi_B = [&](double x) {
        auto re = gl([&](double p) { return std::cos(p * x - p * p * t / 2.0); }, -B / 2, B / 2);
        auto im = gl([&](double p) { return std::sin(p * x - p * p * t / 2.0); }, -B / 2, B / 2);
        return C(re, im) / std::sqrt(2.0 * pi * B);
    };
    auto psi_L = [&](double x) {
        const C pref = 1.0 / std::sqrt(2.0 * pi * t * i);
        auto re = gl([&](double y) { return std::cos((x - y) * (x - y) / (2.0 * t)); }, -L / 2, L / 2);
        auto im = gl([&](double y) { return std::sin((x - y) * (x - y) / (2.0 * t)); }, -L / 2, L / 2);
        return pref * C(re, im) / std::sqrt(L);
    };
    const double norm = 2.0 * (1.0 + s);
    const double M = 2.0 * L;
    const double P_M = gl([&](double x) { return std::norm(psi_L(x) + psi_B(x)) / norm; }, -M / 2, M / 2);
    return Superposition{s, P_L, P_L, P_M};
}

}  // namespace oracle
