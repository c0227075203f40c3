#pragma once

#include <cmath>
#include <random>

#include "phasepath/mixture.hpp"
#include "phasepath/wavefunction.hpp"

namespace support {

/// Coarse grid aligned to both boxes; small enough for the Wigner lattice.
inline phasepath::GridSpec wigner_grid(const phasepath::NaturalUnits& u) { return phasepath::aligned_grid(u.L, u.B, 3, 17); }

/// Random normalized combination of the two boxes and a Gaussian packet.
inline phasepath::Wavefunction random_superposition(const phasepath::BoxPair& boxes, std::mt19937_64& rng) {
    using namespace phasepath;
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const GridSpec grid = boxes.L.position_grid();
    const Wavefunction gauss = make_gaussian(grid, 0.3 + 2.0 * std::abs(u(rng)), 5.0 * u(rng), 0.5 * u(rng));
    const complex c[3] = {{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
    std::vector<complex> amps(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) amps[i] = c[0] * boxes.L[i] + c[1] * boxes.B[i] + c[2] * gauss[i];
    Wavefunction psi = boxes.L.with_amplitudes(amps);
    const double scale = 1.0 / std::sqrt(psi.norm_sq());
    for (auto& a : amps) a *= scale;
    return boxes.L.with_amplitudes(std::move(amps));
}

}  // namespace support
