#include "phasepath/mixture.hpp"

#include <cmath>
#include <string>

#include "phasepath/errors.hpp"
#include "phasepath/propagation.hpp"

namespace phasepath {

void QuasiProbabilities::validate(double tol) const {
    if (!std::isfinite(w_L) || !std::isfinite(w_B) || !std::isfinite(w_inter)) {
        throw NotNormalized("quasi-probabilities must be finite");
    }
    if (std::abs(sum() - 1.0) > tol) {
        throw NotNormalized("quasi-probabilities sum to " + std::to_string(sum()) + ", not 1");
    }
    if (w_L < 0.0 || w_B < 0.0) throw NotNormalized("w_L and w_B must be non-negative");
}

QuasiProbabilities QuasiProbabilities::pure_superposition(double overlap) {
    if (!(overlap > -1.0)) throw InvalidArgument("overlap must exceed -1");
    const double w = 0.5 / (1.0 + overlap);
    return QuasiProbabilities{w, w, 1.0 - 2.0 * w};
}

BoxPair BoxPair::make(const NaturalUnits& units, const GridSpec& grid) {
    require_span_for_states(grid, units.L, units.B);
    Wavefunction l = make_box_position(units.L, grid);
    Wavefunction b = fourier_transform(make_box_momentum(units.B, grid));
    const double s = overlap_exact(b, l).real();
    return BoxPair{units, std::move(l), std::move(b), s};
}

BoxMixture::BoxMixture(BoxPair boxes, QuasiProbabilities weights) : boxes_(std::move(boxes)), weights_(weights) {
    weights_.validate();
    if (weights_.w_inter != 0.0 && std::abs(boxes_.overlap) < 1e-12) {
        throw DegenerateSuperposition("interference weight needs a non-zero overlap");
    }
}

std::vector<double> BoxMixture::combine(const Wavefunction& l, const Wavefunction& b) const {
    const double c = weights_.w_inter == 0.0 ? 0.0 : weights_.w_inter / boxes_.overlap;
    std::vector<double> rho(l.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho[i] = weights_.w_L * std::norm(l[i]) + weights_.w_B * std::norm(b[i]) + c * std::real(l[i] * std::conj(b[i]));
    }
    return rho;
}

std::vector<double> BoxMixture::position_density(double t) const {
    return combine(propagate_free(boxes_.L, t), propagate_free(boxes_.B, t));
}

std::vector<double> BoxMixture::momentum_density() const {
    return combine(boxes_.L.in(Representation::momentum), boxes_.B.in(Representation::momentum));
}

double BoxMixture::P_L() const {
    const auto w = grid().coverage_weights(-0.5 * boxes_.units.L, 0.5 * boxes_.units.L);
    return weighted_probability(position_density(), w, grid().dx);
}

double BoxMixture::P_B() const {
    const GridSpec pg = grid().conjugate();
    const auto w = pg.coverage_weights(-0.5 * boxes_.units.B, 0.5 * boxes_.units.B);
    return weighted_probability(momentum_density(), w, pg.dx);
}

double BoxMixture::P_M() const {
    const double M = boxes_.units.M();
    const auto w = grid().coverage_weights(-0.5 * M, 0.5 * M);
    return weighted_probability(position_density(boxes_.units.t_M()), w, grid().dx);
}

}  // namespace phasepath
