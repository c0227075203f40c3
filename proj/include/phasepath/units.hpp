#pragma once

#include <numbers>

namespace phasepath {

// Natural units: action and mass are one, lengths are measured in units of
// the slit width that prepares the position box.
inline constexpr double hbar = 1.0;
inline constexpr double mass = 1.0;
inline constexpr double pi = std::numbers::pi;

/// Widths of the position and momentum boxes in natural units.
struct NaturalUnits {
    double L = 1.0;
    double B = 2.0 * pi * 0.0309;

    static NaturalUnits from_sigma(double sigma, double L = 1.0);

    /// LB / (2 pi hbar).
    double sigma() const { return L * B / (2.0 * pi * hbar); }
    /// Time at which B*t/m = L.
    double t_M() const { return mass * L / B; }
    /// Width L + B t_M / m of the intermediate interval.
    double M() const { return L + B * t_M() / mass; }
};

/// Optical parameters of the laboratory setup, SI units.
struct LabParams {
    double wavelength = 810e-9;
    double slit_width_d = 50e-6;
    double focal_length_f = 0.1;

    /// Throws InvalidArgument unless all fields are positive.
    void validate() const;

    double wavenumber() const { return 2.0 * pi / wavelength; }
    /// d^2 / (lambda f).
    double sigma() const;
    /// Momentum width h d / (lambda f) of the Fourier-prepared box, in units
    /// of hbar per meter.
    double B_over_hbar() const;
    /// lambda f / d, the first diffraction minimum in the focal plane.
    double first_minimum() const;
    /// Widths in natural units (length unit = slit width d).
    NaturalUnits natural() const;

    /// Natural length unit in meters.
    double length_unit() const { return slit_width_d; }
    /// Focal-plane coordinate per natural momentum unit (x_f = f p / hbar k).
    double focal_scale() const;
};

/// Effective free-evolution time of the transverse motion after a
/// propagation distance z along the optical axis (m_eff = hbar k / c).
struct LabTime {
    double seconds = 0.0;
    double natural = 0.0;
};

LabTime lab_plane_to_time(double z, const LabParams& lab);

/// Propagation distance c t_M for intervals L_lab (position) and the
/// Fourier box of the setup: L_lab f / d.
double lab_distance_for_t_M(double L_lab, const LabParams& lab);

inline constexpr double speed_of_light = 299'792'458.0;

}  // namespace phasepath
