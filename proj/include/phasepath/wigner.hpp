#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "phasepath/grid.hpp"
#include "phasepath/mixture.hpp"
#include "phasepath/wavefunction.hpp"

namespace phasepath {

/// Largest state grid accepted for Wigner construction. The phase-space
/// lattice has (2n)^2 cells.
inline constexpr std::size_t kMaxWignerStatePoints = 2048;

/// Wigner function on the half-step lattice of a state grid with n points:
/// 2n columns at dx/2 and 2n rows at dp/2, where dp is the conjugate
/// spacing. Even columns and even rows coincide with the state's own
/// position and momentum samples. Values are row-major with rows indexed by
/// momentum. Position is periodic with the state grid span S, so a packet at
/// x0 also interferes with its image and leaves a sign-alternating ghost
/// near x0 +- S/2 that integrates to zero along p.
class WignerGrid {
public:
    WignerGrid(GridSpec x_axis, GridSpec p_axis, std::vector<double> values);

    const GridSpec& x_axis() const { return x_axis_; }
    const GridSpec& p_axis() const { return p_axis_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * x_axis_.n, x_axis_.n}; }
    double at(std::size_t row, std::size_t col) const { return values_[row * x_axis_.n + col]; }

    /// Position grid of the underlying state (every second column).
    GridSpec state_grid() const;
    /// Momentum axis of the underlying state (every second row).
    GridSpec state_momentum_axis() const;

    double integral() const;
    double max_abs() const;
    double min_value() const;
    /// Density |psi(x_j)|^2 on the state grid.
    std::vector<double> x_marginal() const;
    /// Density |phi(p_k)|^2 on the state momentum axis.
    std::vector<double> p_marginal() const;
    /// Integral over the rows that fall between state momentum samples.
    double odd_row_mass() const;

private:
    GridSpec x_axis_;
    GridSpec p_axis_;
    std::vector<double> values_;
};

/// One term c |a><b| of a density operator.
struct OperatorTerm {
    complex coefficient;
    const Wavefunction* ket;
    const Wavefunction* bra;
};

/// Real part of the Wigner function of sum_i c_i |a_i><b_i|.
WignerGrid wigner_from_terms(std::span<const OperatorTerm> terms);

WignerGrid wigner_from_pure(const Wavefunction& psi);

/// Wigner function of the box decomposition; weights must sum to one.
WignerGrid wigner_from_mixture(const QuasiProbabilities& weights, const BoxPair& boxes);
WignerGrid wigner_from_mixture(const QuasiProbabilities& weights, const NaturalUnits& units, const GridSpec& grid);

/// Estimated wrapped probability above which a shear is refused.
inline constexpr double kShearWrapLimit = 0.05;

/// W'(x, p) = W(x - p t / m, p), applied per row as an exact band-limited
/// shift. Throws ShearOutOfRange when more than kShearWrapLimit of the
/// probability would cross the periodic boundary (estimated from the
/// marginals).
WignerGrid shear_evolve(const WignerGrid& w, double t);

struct RegionReport {
    double L = 0.0;
    double B = 0.0;
    double t_M = 0.0;
    double M = 0.0;
    double P_L = 0.0;
    double P_B = 0.0;
    double P_M = 0.0;
    double W_LB = 0.0;
    double W_in = 0.0;
    double W_out = 0.0;
    double W_diag = 0.0;
    double total = 0.0;
};

/// Strip, rectangle and sheared-strip integrals for intervals centered at
/// the origin. M = L + B t_M / m.
RegionReport region_integrals(const WignerGrid& w, double L, double B, double t_M);

struct NegativityBounds {
    double W_LB_max = 0.0;
    double W_out_max = 0.0;
};

/// W_LB <= LB/(pi hbar) and the implied upper bound on W_out.
NegativityBounds negativity_bounds(double P_L, double P_B, double L, double B);

/// sum |W1 - W2| over the lattice times the cell area.
double l1_distance(const WignerGrid& a, const WignerGrid& b);

/// CSV with header x_nat,p_nat,W_nat; `stride` keeps every stride-th row
/// and column.
void write_wigner_csv(const WignerGrid& w, const std::filesystem::path& path, std::size_t stride = 1);
/// Row-major little-endian float64 values at `path` plus a JSON header at
/// `path` with ".json" appended.
void write_wigner_binary(const WignerGrid& w, const std::filesystem::path& path);
WignerGrid read_wigner_binary(const std::filesystem::path& path);

}  // namespace phasepath
