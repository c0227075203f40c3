#include <doctest.h>

#include <string>

#include "phasepath/config.hpp"
#include "phasepath/errors.hpp"

using namespace phasepath;

namespace {

int error_line(const std::string& text, std::string* field = nullptr) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        if (field) *field = e.field();
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("parse a full configuration") {
    const RunConfig c = parse_config(R"(# run settings
[state]
kind = "gaussian"
gaussian_width_um = 120.5   # trailing comment

[lab]
wavelength_m = 6.33e-7
slit_width_m = 4.8e-5

[detector]
dwell_time_s = 2.0
background_rate_per_s = 3
seed = 99

[analysis]
L_um = 60
B_um = 50
M_um = 110
strict_fits = false

[grid]
cells_in_L = 31
wigner_stride = 4
)");
    CHECK(c.state.kind == StateKind::gaussian);
    CHECK(c.state.gaussian_width_um == 120.5);
    CHECK(c.lab.wavelength == 6.33e-7);
    CHECK(c.lab.slit_width_d == 4.8e-5);
    CHECK(c.lab.focal_length_f == 0.1);
    CHECK(c.detector.dwell_time_s == 2.0);
    CHECK(c.detector.background_rate == 3.0);
    CHECK(c.detector.rng_seed == 99);
    CHECK(c.analysis.L_um == 60.0);
    CHECK_FALSE(c.analysis.strict_fits);
    CHECK(c.analysis.lab.wavelength == 6.33e-7);
    CHECK(c.grid.cells_in_L == 31);
    CHECK(c.grid.cells_in_B == 45);
    CHECK(c.grid.wigner_stride == 4);
}

TEST_CASE("empty text gives the defaults") {
    const RunConfig c = parse_config("");
    CHECK(c.state.kind == StateKind::mixture);
    CHECK(c.state.weights.w_inter == 0.152);
    CHECK(c.detector.step_um == 5.0);
    CHECK(c.analysis.M_um == 110.0);
}

TEST_CASE("errors name the line and field") {
    std::string field;
    CHECK(error_line("[state]\nbogus = 1\n", &field) == 2);
    CHECK(field == "state.bogus");
    CHECK(error_line("[nowhere]\n") == 1);
    CHECK(error_line("x = 1\n") == 1);
    CHECK(error_line("[lab]\nwavelength_m = \"red\"\n", &field) == 2);
    CHECK(field == "lab.wavelength_m");
    CHECK(error_line("[lab]\nwavelength_m = 1e-6\nwavelength_m = 2e-6\n", &field) == 3);
    CHECK(error_line("[lab]\nslit_width_m = -1\n", &field) == 2);
    CHECK(field == "lab.slit_width_m");
    CHECK(error_line("[analysis]\nL_um = 55\nB_um = 55\nM_um = 100\n", &field) == 4);
    CHECK(field == "analysis.M_um");
    CHECK(error_line("[grid]\n\ncells_in_B = 44\n", &field) == 3);
    CHECK(field == "grid.cells_in_B");
    CHECK(error_line("[state]\nw_L = 0.5\nw_B = 0.5\nw_inter = 0.5\n", &field) > 0);
    CHECK(error_line("[state]\nkind = \"cat\"\n", &field) == 2);
    CHECK(error_line("[detector]\nstrict = true\n") == 2);
    CHECK(error_line("[analysis]\nnominal_overlap_sq = 1.5\n", &field) == 2);
    CHECK(error_line("[lab\n") == 1);
    CHECK(error_line("[lab]\nwavelength_m\n") == 2);
}

TEST_CASE("serialized configuration parses back unchanged") {
    RunConfig c;
    c.state.kind = StateKind::pure;
    c.lab.wavelength = 7.77e-7;
    c.detector.rng_seed = 123456789;
    c.detector.intensity_noise = 0.01;
    c.span = {-2500.0, 2500.0};
    c.analysis.tail.excluded_window = Interval::centered(500.0);
    c.analysis.certify_sigma = 2.5;
    c.grid.wigner_cells_in_B = 21;
    const std::string text = config_to_toml(c);
    const RunConfig back = parse_config(text);
    CHECK(config_to_toml(back) == text);
    CHECK(back.state.kind == StateKind::pure);
    CHECK(back.lab.wavelength == c.lab.wavelength);
    CHECK(back.detector.rng_seed == c.detector.rng_seed);
    CHECK(back.detector.intensity_noise == c.detector.intensity_noise);
    CHECK(back.span.start_um == -2500.0);
    CHECK(back.analysis.tail.excluded_window.hi == 250.0);
    CHECK(back.analysis.certify_sigma == 2.5);
    CHECK(back.grid.wigner_cells_in_B == 21);
}
