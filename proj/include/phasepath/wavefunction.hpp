#pragma once

#include <complex>
#include <span>
#include <vector>

#include "phasepath/grid.hpp"
#include "phasepath/units.hpp"

namespace phasepath {

using complex = std::complex<double>;

enum class Representation { position, momentum };

/// Complex amplitudes on a uniform grid. The position grid is stored in both
/// representations; the momentum axis is always its conjugate. The discrete
/// norm is sum |psi_i|^2 * (cell width).
class Wavefunction {
public:
    Wavefunction(GridSpec position_grid, Representation representation, std::vector<complex> amplitudes);

    const GridSpec& position_grid() const { return grid_; }
    GridSpec momentum_grid() const { return grid_.conjugate(); }
    /// Axis of the current representation.
    GridSpec axis() const;
    Representation representation() const { return representation_; }

    std::span<const complex> amplitudes() const { return amplitudes_; }
    std::size_t size() const { return amplitudes_.size(); }
    complex operator[](std::size_t i) const { return amplitudes_[i]; }

    /// Amplitude at the sample nearest to `coordinate` on the current axis.
    complex value_at(double coordinate) const;

    double norm_sq() const;
    /// |psi_i|^2 on the current axis (probability per unit coordinate).
    std::vector<double> density() const;

    /// Same state in the requested representation.
    Wavefunction in(Representation representation) const;

    Wavefunction with_amplitudes(std::vector<complex> amplitudes) const;

private:
    GridSpec grid_;
    Representation representation_;
    std::vector<complex> amplitudes_;
};

/// Unitary change of representation: phi(p) = dx/sqrt(2 pi hbar) sum psi(x) e^{-ipx/hbar}
/// and its inverse. Requires an even point count.
Wavefunction fourier_transform(const Wavefunction& psi);

/// Position box |L>: 1/sqrt(L) on |x| <= L/2; edge cells weighted by coverage.
Wavefunction make_box_position(double L, const GridSpec& grid);

/// Momentum box |B>: 1/sqrt(B) on |p| <= B/2 on the conjugate axis of `grid`,
/// returned in momentum representation.
Wavefunction make_box_momentum(double B, const GridSpec& grid);

/// Minimum-uncertainty Gaussian with position spread sigma_x, centered at
/// (x0, p0), normalized on the grid.
Wavefunction make_gaussian(const GridSpec& grid, double sigma_x, double x0 = 0.0, double p0 = 0.0);

/// Discrete inner product <a|b>; both states must share grid and representation.
complex overlap_exact(const Wavefunction& a, const Wavefunction& b);

struct OverlapApprox {
    double value = 0.0;
    /// Set when LB/(2 pi hbar) > 0.1, where the small-sigma form degrades.
    bool approximation_warning = false;
};

/// sqrt(LB / 2 pi hbar).
OverlapApprox overlap_approx(double L, double B);

/// 1 / sqrt(2 (1 + Re[e^{i phase} <a|b>])) for normalized a, b.
double superposition_norm(const Wavefunction& a, const Wavefunction& b, double relative_phase = 0.0);

/// (a + e^{i phase} b) normalized.
Wavefunction superpose(const Wavefunction& a, const Wavefunction& b, double relative_phase = 0.0);

/// Equal superposition of |L> and |B> in position representation; checks
/// that the grid covers the diffraction tails of both boxes.
Wavefunction equal_superposition(const NaturalUnits& units, const GridSpec& grid, double relative_phase = 0.0);

/// Probability in [center - width/2, center + width/2] on the current axis,
/// edge cells weighted by coverage.
double interval_probability(const Wavefunction& psi, double center, double width);

/// Weighted sum of |psi_i|^2 * d with per-cell weights.
double weighted_probability(std::span<const double> density, std::span<const double> weights, double cell);

}  // namespace phasepath
