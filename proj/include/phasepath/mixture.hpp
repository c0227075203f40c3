#pragma once

#include <vector>

#include "phasepath/grid.hpp"
#include "phasepath/units.hpp"
#include "phasepath/wavefunction.hpp"

namespace phasepath {

/// Weights of rho = w_L |L><L| + w_B |B><B| + w_inter (|L><B| + |B><L|) / (2 <B|L>).
struct QuasiProbabilities {
    double w_L = 0.0;
    double w_B = 0.0;
    double w_inter = 0.0;

    double sum() const { return w_L + w_B + w_inter; }
    /// Throws NotNormalized unless the weights sum to one within `tol` and
    /// the diagonal weights are non-negative.
    void validate(double tol = 1e-9) const;

    /// Weights of the normalized equal superposition with real overlap s.
    static QuasiProbabilities pure_superposition(double overlap);
};

/// The position box, the momentum box and their grid overlap, sharing one
/// position grid.
struct BoxPair {
    NaturalUnits units;
    Wavefunction L;  ///< position representation
    Wavefunction B;  ///< position representation
    double overlap = 0.0;

    static BoxPair make(const NaturalUnits& units, const GridSpec& grid);
};

/// Density operator of the box decomposition, evaluated on the grid.
class BoxMixture {
public:
    BoxMixture(BoxPair boxes, QuasiProbabilities weights);

    const BoxPair& boxes() const { return boxes_; }
    const QuasiProbabilities& weights() const { return weights_; }
    const GridSpec& grid() const { return boxes_.L.position_grid(); }

    /// Position density after free evolution for time t.
    std::vector<double> position_density(double t = 0.0) const;
    /// Momentum density on the conjugate axis.
    std::vector<double> momentum_density() const;

    double P_L() const;
    double P_B() const;
    /// Probability in the intermediate interval M at t_M.
    double P_M() const;

private:
    std::vector<double> combine(const Wavefunction& l, const Wavefunction& b) const;

    BoxPair boxes_;
    QuasiProbabilities weights_;
};

}  // namespace phasepath
