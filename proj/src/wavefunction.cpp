#include "phasepath/wavefunction.hpp"

#include <cmath>
#include <string>

#include "fft.hpp"
#include "phasepath/errors.hpp"

namespace phasepath {
namespace {

void require_same_space(const Wavefunction& a, const Wavefunction& b) {
    if (!(a.position_grid() == b.position_grid())) throw GridMismatch("states live on different grids");
    if (a.representation() != b.representation()) throw GridMismatch("states are in different representations");
}

std::vector<complex> box_amplitudes(const GridSpec& axis, double width) {
    const double half = 0.5 * width;
    if (width < 2.0 * axis.dx) {
        throw GridTooCoarse("box width " + std::to_string(width) + " spans fewer than two cells of " +
                            std::to_string(axis.dx));
    }
    if (!axis.contains_interval(-width, width)) {
        throw GridTooNarrow("grid must cover [-" + std::to_string(width) + ", " + std::to_string(width) + "]");
    }
    // Edges within 1e-4 of a cell boundary snap onto it; otherwise a sliver
    // cell would carry amplitude of order sqrt(1e-4) through the square root.
    constexpr double snap = 1e-4;
    std::vector<complex> amps(axis.n);
    double norm = 0.0;
    for (std::size_t i = 0; i < axis.n; ++i) {
        double c = axis.coverage(i, -half, half);
        if (c < snap) c = 0.0;
        if (c > 1.0 - snap) c = 1.0;
        amps[i] = std::sqrt(c / width);
        norm += c / width * axis.dx;
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : amps) a *= scale;
    return amps;
}

}  // namespace

Wavefunction::Wavefunction(GridSpec position_grid, Representation representation, std::vector<complex> amplitudes)
    : grid_(position_grid), representation_(representation), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != grid_.n) {
        throw InvalidArgument("amplitude count " + std::to_string(amplitudes_.size()) + " does not match grid size " +
                              std::to_string(grid_.n));
    }
}

GridSpec Wavefunction::axis() const {
    return representation_ == Representation::position ? grid_ : grid_.conjugate();
}

complex Wavefunction::value_at(double coordinate) const {
    const GridSpec ax = axis();
    const double idx = std::round((coordinate - ax.x_min) / ax.dx);
    if (idx < 0.0 || idx >= static_cast<double>(ax.n)) return {0.0, 0.0};
    return amplitudes_[static_cast<std::size_t>(idx)];
}

double Wavefunction::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s * axis().dx;
}

std::vector<double> Wavefunction::density() const {
    std::vector<double> d(amplitudes_.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(amplitudes_[i]);
    return d;
}

Wavefunction Wavefunction::in(Representation representation) const {
    return representation == representation_ ? *this : fourier_transform(*this);
}

Wavefunction Wavefunction::with_amplitudes(std::vector<complex> amplitudes) const {
    return Wavefunction(grid_, representation_, std::move(amplitudes));
}

Wavefunction fourier_transform(const Wavefunction& psi) {
    const GridSpec xg = psi.position_grid();
    const GridSpec pg = xg.conjugate();
    const std::size_t n = xg.n;
    if (n % 2 != 0) throw InvalidGrid("Fourier transform needs an even point count");

    std::vector<complex> buf(psi.amplitudes().begin(), psi.amplitudes().end());
    if (psi.representation() == Representation::position) {
        for (std::size_t j = 1; j < n; j += 2) buf[j] = -buf[j];
        detail::fft_inplace(buf, detail::FftDirection::forward);
        const double scale = xg.dx / std::sqrt(2.0 * pi * hbar);
        for (std::size_t k = 0; k < n; ++k) buf[k] *= scale * std::polar(1.0, -pg.at(k) * xg.x_min / hbar);
        return Wavefunction(xg, Representation::momentum, std::move(buf));
    }
    for (std::size_t k = 0; k < n; ++k) buf[k] *= std::polar(1.0, pg.at(k) * xg.x_min / hbar);
    detail::fft_inplace(buf, detail::FftDirection::backward);
    const double scale = pg.dx / std::sqrt(2.0 * pi * hbar);
    for (std::size_t j = 0; j < n; ++j) buf[j] *= (j % 2 ? -scale : scale);
    return Wavefunction(xg, Representation::position, std::move(buf));
}

Wavefunction make_box_position(double L, const GridSpec& grid) {
    if (!(L > 0.0)) throw InvalidArgument("box width must be positive");
    return Wavefunction(grid, Representation::position, box_amplitudes(grid, L));
}

Wavefunction make_box_momentum(double B, const GridSpec& grid) {
    if (!(B > 0.0)) throw InvalidArgument("box width must be positive");
    return Wavefunction(grid, Representation::momentum, box_amplitudes(grid.conjugate(), B));
}

Wavefunction make_gaussian(const GridSpec& grid, double sigma_x, double x0, double p0) {
    if (!(sigma_x > 0.0)) throw InvalidArgument("Gaussian width must be positive");
    std::vector<complex> amps(grid.n);
    double norm = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double u = grid.at(i) - x0;
        amps[i] = std::exp(-u * u / (4.0 * sigma_x * sigma_x)) * std::polar(1.0, p0 * grid.at(i) / hbar);
        norm += std::norm(amps[i]);
    }
    norm *= grid.dx;
    if (!(norm > 0.0)) throw GridTooNarrow("Gaussian has no support on the grid");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : amps) a *= scale;
    return Wavefunction(grid, Representation::position, std::move(amps));
}

complex overlap_exact(const Wavefunction& a, const Wavefunction& b) {
    require_same_space(a, b);
    complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s * a.axis().dx;
}

OverlapApprox overlap_approx(double L, double B) {
    if (!(L > 0.0) || !(B > 0.0)) throw InvalidArgument("box widths must be positive");
    const double sigma = L * B / (2.0 * pi * hbar);
    return OverlapApprox{std::sqrt(sigma), sigma > 0.1};
}

double superposition_norm(const Wavefunction& a, const Wavefunction& b, double relative_phase) {
    const double denom = 2.0 * (1.0 + std::real(std::polar(1.0, relative_phase) * overlap_exact(a, b)));
    if (denom < 1e-12) throw DegenerateSuperposition("superposition has vanishing norm");
    return 1.0 / std::sqrt(denom);
}

Wavefunction superpose(const Wavefunction& a, const Wavefunction& b, double relative_phase) {
    const double c = superposition_norm(a, b, relative_phase);
    const complex phase = std::polar(1.0, relative_phase);
    std::vector<complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * (a[i] + phase * b[i]);
    return a.with_amplitudes(std::move(out));
}

Wavefunction equal_superposition(const NaturalUnits& units, const GridSpec& grid, double relative_phase) {
    require_span_for_states(grid, units.L, units.B);
    const Wavefunction l = make_box_position(units.L, grid);
    const Wavefunction b = fourier_transform(make_box_momentum(units.B, grid));
    return superpose(l, b, relative_phase);
}

double weighted_probability(std::span<const double> density, std::span<const double> weights, double cell) {
    if (density.size() != weights.size()) throw InvalidArgument("density and weights differ in length");
    double s = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) s += density[i] * weights[i];
    return s * cell;
}

double interval_probability(const Wavefunction& psi, double center, double width) {
    if (!(width >= 0.0)) throw InvalidArgument("interval width must be non-negative");
    const GridSpec ax = psi.axis();
    const auto w = ax.coverage_weights(center - 0.5 * width, center + 0.5 * width);
    return weighted_probability(psi.density(), w, ax.dx);
}

}  // namespace phasepath
