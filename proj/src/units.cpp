#include "phasepath/units.hpp"

#include "phasepath/errors.hpp"

namespace phasepath {

NaturalUnits NaturalUnits::from_sigma(double sigma, double L) {
    if (!(sigma > 0.0) || !(L > 0.0)) throw InvalidArgument("sigma and L must be positive");
    return NaturalUnits{L, 2.0 * pi * hbar * sigma / L};
}

void LabParams::validate() const {
    if (!(wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
    if (!(slit_width_d > 0.0)) throw InvalidArgument("slit width must be positive");
    if (!(focal_length_f > 0.0)) throw InvalidArgument("focal length must be positive");
}

double LabParams::sigma() const {
    validate();
    return slit_width_d * slit_width_d / (wavelength * focal_length_f);
}

double LabParams::B_over_hbar() const {
    validate();
    return wavenumber() * slit_width_d / focal_length_f;
}

double LabParams::first_minimum() const {
    validate();
    return wavelength * focal_length_f / slit_width_d;
}

NaturalUnits LabParams::natural() const { return NaturalUnits::from_sigma(sigma(), 1.0); }

double LabParams::focal_scale() const {
    validate();
    // x_f = f p / (hbar k); with p in units of hbar/d and x_f in units of d.
    return focal_length_f / (wavenumber() * slit_width_d * slit_width_d);
}

LabTime lab_plane_to_time(double z, const LabParams& lab) {
    lab.validate();
    if (z < 0.0) throw InvalidArgument("propagation distance must be non-negative");
    const double d = lab.slit_width_d;
    return LabTime{z / speed_of_light, z / (lab.wavenumber() * d * d)};
}

double lab_distance_for_t_M(double L_lab, const LabParams& lab) {
    lab.validate();
    if (!(L_lab > 0.0)) throw InvalidArgument("interval width must be positive");
    return L_lab * lab.focal_length_f / lab.slit_width_d;
}

}  // namespace phasepath
