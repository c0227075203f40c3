#pragma once

#include <complex>

#include "phasepath/units.hpp"
#include "phasepath/wavefunction.hpp"

namespace phasepath {

/// Free evolution exp(-i p^2 t / 2 m hbar), applied exactly in momentum
/// space. The result is returned in the input representation.
Wavefunction propagate_free(const Wavefunction& psi, double t);

/// Chirp resolution of the spectral propagator on a given grid.
struct AliasingReport {
    /// Largest phase increment of the chirp between adjacent momentum cells.
    double max_phase_step = 0.0;
    /// Set when the step exceeds pi; the wrapped position axis is then too
    /// short for the fastest components.
    bool warning = false;
};

AliasingReport chirp_aliasing(const GridSpec& position_grid, double t);

struct FarFieldValue {
    complex value;
    /// False below hbar t / (m L^2) = 1.
    bool valid = false;
};

/// Long-time amplitude of the evolved position box:
/// sqrt(mL/(2 pi hbar t)) sinc(mLx/2hbar t) exp[i(mx^2/2hbar t - pi/4)].
FarFieldValue farfield_position_state(double x, double t, double L);

/// Position amplitude sqrt(B/2 pi hbar) sinc(Bx/2hbar) of the momentum box.
double stationary_momentum_state(double x, double B);

/// Focal-plane field of a thin lens of focal length f: the momentum
/// amplitude mapped onto x_f = f p/(hbar k). Output is in position
/// representation on a grid in units of the slit width.
Wavefunction lens_fourier(const Wavefunction& psi, double f, const LabParams& lab);

/// sin(u)/u with the removable singularity filled in.
double sinc(double u);

}  // namespace phasepath
