#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace phasepath {

/// Uniform 1D sampling axis. Sample i sits at x_min + i*dx and owns the cell
/// [x_i - dx/2, x_i + dx/2].
struct GridSpec {
    double x_min = 0.0;
    double dx = 1.0;
    std::size_t n = 0;

    GridSpec() = default;
    GridSpec(double x_min, double dx, std::size_t n);

    /// Grid with x = 0 on sample n/2.
    static GridSpec centered(double dx, std::size_t n);

    double at(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
    double x_max() const { return at(n - 1); }
    double span() const { return static_cast<double>(n) * dx; }
    double lower_edge() const { return x_min - 0.5 * dx; }
    double upper_edge() const { return lower_edge() + span(); }

    /// Fraction of cell i covered by [a, b].
    double coverage(std::size_t i, double a, double b) const;

    /// Per-cell coverage of [a, b]; throws IntervalOutsideGrid if [a, b]
    /// leaves the grid.
    std::vector<double> coverage_weights(double a, double b) const;

    bool contains_interval(double a, double b) const;

    /// Momentum axis conjugate to this position axis under the discrete
    /// Fourier transform: dp = 2*pi*hbar/(n*dx), centered.
    GridSpec conjugate() const;

    bool operator==(const GridSpec& other) const;
};

/// Grid whose cells line up with the edges of a position box of width L and
/// a momentum box of width B (both odd cell counts), with x = 0 and p = 0 on
/// a sample. The point count follows from dx*dp = 2*pi*hbar/n.
GridSpec aligned_grid(double L, double B, int cells_in_L = 45, int cells_in_B = 45);

/// Throws GridTooNarrow unless the grid spans +-8*max(L, 2*pi*hbar/B).
void require_span_for_states(const GridSpec& grid, double L, double B);

}  // namespace phasepath
