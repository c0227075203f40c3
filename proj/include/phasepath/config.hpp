#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "phasepath/analysis.hpp"
#include "phasepath/detector.hpp"
#include "phasepath/mixture.hpp"
#include "phasepath/units.hpp"

namespace phasepath {

enum class StateKind { mixture, pure, position_box, momentum_box, gaussian };

std::string state_kind_label(StateKind kind);
/// Inverse of state_kind_label; throws ConfigError on an unknown label.
StateKind state_kind_from_label(const std::string& label);

struct StateConfig {
    StateKind kind = StateKind::mixture;
    QuasiProbabilities weights{0.355, 0.493, 0.152};
    /// Position-space standard deviation of the Gaussian state, um.
    double gaussian_width_um = 150.0;
};

struct GridConfig {
    int cells_in_L = 45;
    int cells_in_B = 45;
    /// Coarser grid for the Wigner lattice, which is quadratic in size.
    int wigner_cells_in_L = 3;
    int wigner_cells_in_B = 17;
    std::size_t wigner_stride = 8;
};

/// Everything a command needs; the defaults describe the reference optical setup.
struct RunConfig {
    StateConfig state;
    LabParams lab;
    DetectorConfig detector;
    ScanSpan span;
    AnalysisConfig analysis;
    GridConfig grid;
};

/// Parses the TOML subset used by the tool: [state], [lab], [detector],
/// [analysis] and [grid] tables of scalar keys (numbers, booleans, quoted
/// strings) with # comments. Missing keys keep their defaults. Throws
/// ConfigError naming the line and the offending field.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// TOML text of `config` that parses back to the same values.
std::string config_to_toml(const RunConfig& config);

}  // namespace phasepath
