#include "phasepath/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phasepath/errors.hpp"
#include "phasepath/units.hpp"

namespace phasepath {

GridSpec::GridSpec(double x_min_, double dx_, std::size_t n_) : x_min(x_min_), dx(dx_), n(n_) {
    if (!(dx > 0.0) || !std::isfinite(dx)) throw InvalidGrid("grid spacing must be positive");
    if (n < 16) throw InvalidGrid("grid needs at least 16 points, got " + std::to_string(n));
    if (!std::isfinite(x_min)) throw InvalidGrid("grid origin must be finite");
}

GridSpec GridSpec::centered(double dx, std::size_t n) {
    return GridSpec(-static_cast<double>(n / 2) * dx, dx, n);
}

double GridSpec::coverage(std::size_t i, double a, double b) const {
    const double lo = std::max(at(i) - 0.5 * dx, a);
    const double hi = std::min(at(i) + 0.5 * dx, b);
    return hi > lo ? std::min(1.0, (hi - lo) / dx) : 0.0;
}

bool GridSpec::contains_interval(double a, double b) const {
    // Relative slack absorbs rounding when the interval ends on the outer edge.
    const double slack = 1e-9 * dx;
    return a <= b && a >= lower_edge() - slack && b <= upper_edge() + slack;
}

std::vector<double> GridSpec::coverage_weights(double a, double b) const {
    if (!contains_interval(a, b)) {
        throw IntervalOutsideGrid("interval [" + std::to_string(a) + ", " + std::to_string(b) +
                                  "] outside grid [" + std::to_string(lower_edge()) + ", " +
                                  std::to_string(upper_edge()) + "]");
    }
    std::vector<double> w(n, 0.0);
    const auto first = static_cast<std::ptrdiff_t>(std::floor((a - lower_edge()) / dx));
    const auto last = static_cast<std::ptrdiff_t>(std::ceil((b - lower_edge()) / dx));
    const auto lo = std::max<std::ptrdiff_t>(0, first - 1);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, last + 1);
    for (auto i = lo; i <= hi; ++i) w[static_cast<std::size_t>(i)] = coverage(static_cast<std::size_t>(i), a, b);
    return w;
}

GridSpec GridSpec::conjugate() const {
    const double dp = 2.0 * pi * hbar / (static_cast<double>(n) * dx);
    return centered(dp, n);
}

bool GridSpec::operator==(const GridSpec& other) const {
    const double tol = 1e-12 * std::max(std::abs(dx), std::abs(other.dx));
    return n == other.n && std::abs(dx - other.dx) <= tol && std::abs(x_min - other.x_min) <= tol * static_cast<double>(n);
}

GridSpec aligned_grid(double L, double B, int cells_in_L, int cells_in_B) {
    if (!(L > 0.0) || !(B > 0.0)) throw InvalidArgument("box widths must be positive");
    if (cells_in_L < 1 || cells_in_B < 1 || cells_in_L % 2 == 0 || cells_in_B % 2 == 0) {
        throw InvalidArgument("aligned grid needs odd, positive cell counts");
    }
    const double sigma = L * B / (2.0 * pi * hbar);
    const double exact_n = static_cast<double>(cells_in_L) * cells_in_B / sigma;
    auto n = static_cast<std::size_t>(2.0 * std::round(exact_n / 2.0));
    n = std::max<std::size_t>(n, 16);
    return GridSpec::centered(L / cells_in_L, n);
}

void require_span_for_states(const GridSpec& grid, double L, double B) {
    const double reach = 8.0 * std::max(L, 2.0 * pi * hbar / B);
    if (grid.lower_edge() > -reach || grid.upper_edge() < reach) {
        throw GridTooNarrow("grid must span +-" + std::to_string(reach) + " for L=" + std::to_string(L) +
                            ", B=" + std::to_string(B));
    }
}

}  // namespace phasepath
