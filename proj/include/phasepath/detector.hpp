#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phasepath/grid.hpp"

namespace phasepath {

/// Probability density sampled on a uniform lab axis in micrometres.
struct SampledDensity {
    GridSpec axis_um;
    std::vector<double> per_um;

    /// Rescales a density given in natural units (per unit length) on
    /// `axis` to micrometres, with `um_per_unit` micrometres per unit.
    static SampledDensity from_natural(const GridSpec& axis, std::span<const double> density, double um_per_unit);

    double total() const;
    /// Integral of the piecewise-constant density over [a, b].
    double integral(double a_um, double b_um) const;
};

struct DetectorConfig {
    double slit_width_um = 5.0;
    double step_um = 5.0;
    double dwell_time_s = 500.0 / 5400.0;
    double signal_rate_peak = 5400.0;
    double monitor_rate = 1.5e4;
    double background_rate = 0.0;
    double dead_time_s = 30e-9;
    /// Relative standard deviation of the source intensity between points;
    /// it scales signal and monitor alike.
    double intensity_noise = 0.0;
    std::uint64_t rng_seed = 1;

    void validate() const;
};

enum class Plane { t0_position, t0_momentum, t_M };

std::string plane_label(Plane plane);
Plane plane_from_label(const std::string& label);

struct ScanSpan {
    double start_um = -3000.0;
    double stop_um = 3000.0;
};

struct ScanRecord {
    std::vector<double> positions_um;
    std::vector<std::int64_t> signal;
    std::vector<std::int64_t> monitor;
    std::vector<std::int64_t> background;
    DetectorConfig config;
    Plane plane = Plane::t0_position;

    std::size_t size() const { return positions_um.size(); }
    /// Throws InvalidArgument on unequal lengths or negative counts.
    void validate() const;
    double step_um() const;
};

/// Non-paralyzable dead time: recorded rate r / (1 + r tau).
double dead_time_rate(double rate, double dead_time_s);

/// Scan positions from start to stop inclusive at the configured step.
std::vector<double> scan_positions(const DetectorConfig& config, const ScanSpan& span);

/// Slit-integrated probability at each position.
std::vector<double> slit_probabilities(const SampledDensity& density, const DetectorConfig& config,
                                       std::span<const double> positions_um);

/// Expected true signal rates (counts/s) before dead time, scaled so the
/// largest equals the configured peak rate. Negative slit probabilities are
/// clipped to zero.
std::vector<double> expected_signal_rates(const SampledDensity& density, const DetectorConfig& config,
                                          std::span<const double> positions_um);

/// Poisson counts for signal (with background and dead time), monitor and a
/// separate background exposure, one independent substream per point and
/// channel.
ScanRecord simulate_scan(const SampledDensity& density, const DetectorConfig& config, const ScanSpan& span,
                         Plane plane = Plane::t0_position);

struct EstimatedDensity {
    std::vector<double> positions_um;
    /// Monitor-corrected net counts and their Poisson errors.
    std::vector<double> net;
    std::vector<double> net_error;
    /// Density per micrometre integrating to one over the scan, with errors.
    std::vector<double> density;
    std::vector<double> error;
    double step_um = 0.0;
    double total_net = 0.0;
    /// False when the net total is not positive; density then equals net.
    bool normalized = false;
};

/// (signal - background) * mean(monitor) / monitor, scaled to unit integral.
/// Negative values are kept. Throws MonitorDropout on a zero monitor count.
EstimatedDensity normalize_scan(const ScanRecord& scan);

struct ScanProbability {
    double value = 0.0;
    double error = 0.0;
};

/// Fraction of the monitor-corrected net counts inside the interval, edge
/// bins weighted by coverage, with a binomial error.
ScanProbability interval_probability_from_scan(const ScanRecord& scan, double center_um, double width_um);

/// CSV `position_um,signal,monitor,background` plus a JSON sidecar at
/// path + ".json" holding the plane label and configuration.
void write_scan(const ScanRecord& scan, const std::filesystem::path& csv_path);
/// Reads a scan; `plane` overrides or replaces a missing sidecar. Throws
/// MissingPlane when neither is available.
ScanRecord read_scan(const std::filesystem::path& csv_path, std::optional<Plane> plane = std::nullopt);

}  // namespace phasepath
