#include "phasepath/propagation.hpp"

#include <cmath>

#include "phasepath/errors.hpp"

namespace phasepath {

double sinc(double u) {
    if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}

Wavefunction propagate_free(const Wavefunction& psi, double t) {
    if (!std::isfinite(t)) throw InvalidArgument("propagation time must be finite");
    if (t == 0.0) return psi;
    const Representation rep = psi.representation();
    const Wavefunction mom = psi.in(Representation::momentum);
    const GridSpec pg = mom.axis();
    std::vector<complex> out(mom.amplitudes().begin(), mom.amplitudes().end());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double p = pg.at(k);
        out[k] *= std::polar(1.0, -p * p * t / (2.0 * mass * hbar));
    }
    return mom.with_amplitudes(std::move(out)).in(rep);
}

AliasingReport chirp_aliasing(const GridSpec& position_grid, double t) {
    const GridSpec pg = position_grid.conjugate();
    const double p_max = std::max(std::abs(pg.x_min), std::abs(pg.x_max()));
    const double step = p_max * std::abs(t) * pg.dx / (mass * hbar);
    return AliasingReport{step, step > pi};
}

FarFieldValue farfield_position_state(double x, double t, double L) {
    if (!(t > 0.0) || !(L > 0.0)) throw InvalidArgument("far field needs t > 0 and L > 0");
    const double a = mass * L / (2.0 * hbar * t);
    const double magnitude = std::sqrt(mass * L / (2.0 * pi * hbar * t)) * sinc(a * x);
    const double phase = mass * x * x / (2.0 * hbar * t) - pi / 4.0;
    const bool valid = hbar * t / (mass * L * L) >= 1.0;
    return FarFieldValue{std::polar(1.0, phase) * magnitude, valid};
}

double stationary_momentum_state(double x, double B) {
    if (!(B > 0.0)) throw InvalidArgument("momentum box width must be positive");
    return std::sqrt(B / (2.0 * pi * hbar)) * sinc(B * x / (2.0 * hbar));
}

Wavefunction lens_fourier(const Wavefunction& psi, double f, const LabParams& lab) {
    if (psi.representation() != Representation::position) {
        throw InvalidArgument("lens input must be in position representation");
    }
    if (!(f > 0.0)) throw InvalidArgument("focal length must be positive");
    lab.validate();
    const double d = lab.slit_width_d;
    const double scale = f / (lab.wavenumber() * d * d);
    const Wavefunction mom = fourier_transform(psi);
    const GridSpec pg = mom.axis();
    const GridSpec focal(pg.x_min * scale, pg.dx * scale, pg.n);
    std::vector<complex> out(mom.amplitudes().begin(), mom.amplitudes().end());
    const double amp = 1.0 / std::sqrt(scale);
    for (auto& a : out) a *= amp;
    return Wavefunction(focal, Representation::position, std::move(out));
}

}  // namespace phasepath
