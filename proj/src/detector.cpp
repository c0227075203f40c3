#include "phasepath/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "phasepath/errors.hpp"

namespace phasepath {
namespace {

enum Channel : std::uint32_t { kSignal = 0, kMonitor = 1, kBackground = 2, kIntensity = 3 };

std::mt19937_64 substream(std::uint64_t seed, std::size_t index, Channel channel) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(channel)};
    return std::mt19937_64(seq);
}

std::int64_t poisson(double mean, std::mt19937_64& rng) {
    if (!(mean > 0.0)) return 0;
    return std::poisson_distribution<std::int64_t>(mean)(rng);
}

nlohmann::json config_json(const DetectorConfig& c) {
    return {{"slit_width_um", c.slit_width_um},
            {"step_um", c.step_um},
            {"dwell_time_s", c.dwell_time_s},
            {"signal_rate_peak_per_s", c.signal_rate_peak},
            {"monitor_rate_per_s", c.monitor_rate},
            {"background_rate_per_s", c.background_rate},
            {"dead_time_s", c.dead_time_s},
            {"intensity_noise", c.intensity_noise},
            {"rng_seed", c.rng_seed}};
}

DetectorConfig config_from_json(const nlohmann::json& j) {
    DetectorConfig c;
    c.slit_width_um = j.value("slit_width_um", c.slit_width_um);
    c.step_um = j.value("step_um", c.step_um);
    c.dwell_time_s = j.value("dwell_time_s", c.dwell_time_s);
    c.signal_rate_peak = j.value("signal_rate_peak_per_s", c.signal_rate_peak);
    c.monitor_rate = j.value("monitor_rate_per_s", c.monitor_rate);
    c.background_rate = j.value("background_rate_per_s", c.background_rate);
    c.dead_time_s = j.value("dead_time_s", c.dead_time_s);
    c.intensity_noise = j.value("intensity_noise", c.intensity_noise);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    return c;
}

// Monitor-corrected net counts with Poisson errors.
void net_counts(const ScanRecord& scan, std::vector<double>& net, std::vector<double>& err) {
    scan.validate();
    double mean_monitor = 0.0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (scan.monitor[i] <= 0) {
            throw MonitorDropout("monitor count is zero at " + std::to_string(scan.positions_um[i]) + " um");
        }
        mean_monitor += static_cast<double>(scan.monitor[i]);
    }
    mean_monitor /= static_cast<double>(scan.size());
    net.resize(scan.size());
    err.resize(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const double s = static_cast<double>(scan.signal[i]);
        const double b = static_cast<double>(scan.background[i]);
        const double m = static_cast<double>(scan.monitor[i]);
        const double f = mean_monitor / m;
        net[i] = (s - b) * f;
        // Counting errors of signal and background, plus the monitor's own.
        err[i] = std::sqrt((s + b) * f * f + net[i] * net[i] / m);
    }
}

}  // namespace

SampledDensity SampledDensity::from_natural(const GridSpec& axis, std::span<const double> density, double um_per_unit) {
    if (density.size() != axis.n) throw InvalidArgument("density length does not match its axis");
    if (!(um_per_unit > 0.0)) throw InvalidArgument("length scale must be positive");
    SampledDensity out{GridSpec(axis.x_min * um_per_unit, axis.dx * um_per_unit, axis.n), {}};
    out.per_um.resize(density.size());
    for (std::size_t i = 0; i < density.size(); ++i) out.per_um[i] = density[i] / um_per_unit;
    return out;
}

double SampledDensity::total() const { return std::accumulate(per_um.begin(), per_um.end(), 0.0) * axis_um.dx; }

double SampledDensity::integral(double a, double b) const {
    if (b < a) std::swap(a, b);
    const double lo = axis_um.lower_edge();
    const double n = static_cast<double>(axis_um.n);
    const double fa = std::clamp((a - lo) / axis_um.dx, 0.0, n);
    const double fb = std::clamp((b - lo) / axis_um.dx, 0.0, n);
    auto ia = static_cast<std::size_t>(fa);
    const auto ib = static_cast<std::size_t>(fb);
    if (ia == ib) return ia < axis_um.n ? per_um[ia] * (fb - fa) * axis_um.dx : 0.0;
    double s = per_um[ia] * (static_cast<double>(ia + 1) - fa);
    for (std::size_t i = ia + 1; i < ib; ++i) s += per_um[i];
    if (ib < axis_um.n) s += per_um[ib] * (fb - static_cast<double>(ib));
    return s * axis_um.dx;
}

void DetectorConfig::validate() const {
    if (!(slit_width_um > 0.0)) throw InvalidArgument("slit width must be positive");
    if (!(step_um > 0.0)) throw InvalidArgument("scan step must be positive");
    if (!(dwell_time_s > 0.0)) throw InvalidArgument("dwell time must be positive");
    if (signal_rate_peak < 0.0 || monitor_rate < 0.0 || background_rate < 0.0) {
        throw InvalidArgument("rates must be non-negative");
    }
    if (dead_time_s < 0.0) throw InvalidArgument("dead time must be non-negative");
    if (intensity_noise < 0.0) throw InvalidArgument("intensity noise must be non-negative");
}

std::string plane_label(Plane plane) {
    switch (plane) {
        case Plane::t0_position: return "t0_pos";
        case Plane::t0_momentum: return "t0_mom";
        case Plane::t_M: return "tM";
    }
    return "unknown";
}

Plane plane_from_label(const std::string& label) {
    if (label == "t0_pos" || label == "t0_position") return Plane::t0_position;
    if (label == "t0_mom" || label == "t0_momentum") return Plane::t0_momentum;
    if (label == "tM" || label == "t_M") return Plane::t_M;
    throw MissingPlane("unknown plane label '" + label + "'");
}

void ScanRecord::validate() const {
    const std::size_t n = positions_um.size();
    if (signal.size() != n || monitor.size() != n || background.size() != n) {
        throw InvalidArgument("scan channels have different lengths");
    }
    if (n < 2) throw InvalidArgument("scan needs at least two points");
    auto negative = [](const std::vector<std::int64_t>& v) {
        return std::any_of(v.begin(), v.end(), [](std::int64_t c) { return c < 0; });
    };
    if (negative(signal) || negative(monitor) || negative(background)) throw InvalidArgument("counts must be non-negative");
}

double ScanRecord::step_um() const {
    return (positions_um.back() - positions_um.front()) / static_cast<double>(positions_um.size() - 1);
}

double dead_time_rate(double rate, double dead_time_s) { return rate / (1.0 + rate * dead_time_s); }

std::vector<double> scan_positions(const DetectorConfig& config, const ScanSpan& span) {
    config.validate();
    if (!(span.stop_um > span.start_um)) throw InvalidArgument("scan span must have stop > start");
    const auto n = static_cast<std::size_t>(std::llround((span.stop_um - span.start_um) / config.step_um)) + 1;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = span.start_um + static_cast<double>(i) * config.step_um;
    return x;
}

std::vector<double> slit_probabilities(const SampledDensity& density, const DetectorConfig& config,
                                       std::span<const double> positions_um) {
    config.validate();
    const double half = 0.5 * config.slit_width_um;
    if (positions_um.front() - half < density.axis_um.lower_edge() ||
        positions_um.back() + half > density.axis_um.upper_edge()) {
        throw IntervalOutsideGrid("scan span exceeds the density grid");
    }
    std::vector<double> p(positions_um.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = density.integral(positions_um[i] - half, positions_um[i] + half);
    return p;
}

std::vector<double> expected_signal_rates(const SampledDensity& density, const DetectorConfig& config,
                                          std::span<const double> positions_um) {
    std::vector<double> p = slit_probabilities(density, config, positions_um);
    for (auto& v : p) v = std::max(0.0, v);
    const double peak = *std::max_element(p.begin(), p.end());
    if (!(peak > 0.0)) throw InvalidArgument("density vanishes over the scan span");
    for (auto& v : p) v *= config.signal_rate_peak / peak;
    return p;
}

ScanRecord simulate_scan(const SampledDensity& density, const DetectorConfig& config, const ScanSpan& span,
                         Plane plane) {
    ScanRecord scan;
    scan.config = config;
    scan.plane = plane;
    scan.positions_um = scan_positions(config, span);
    const std::vector<double> rates = expected_signal_rates(density, config, scan.positions_um);
    const std::size_t n = rates.size();
    scan.signal.resize(n);
    scan.monitor.resize(n);
    scan.background.resize(n);
    const double dwell = config.dwell_time_s;
    for (std::size_t i = 0; i < n; ++i) {
        double intensity = 1.0;
        if (config.intensity_noise > 0.0) {
            auto rng = substream(config.rng_seed, i, kIntensity);
            intensity = std::max(0.0, 1.0 + config.intensity_noise * std::normal_distribution<double>()(rng));
        }
        auto rs = substream(config.rng_seed, i, kSignal);
        auto rm = substream(config.rng_seed, i, kMonitor);
        auto rb = substream(config.rng_seed, i, kBackground);
        const double recorded = dead_time_rate(rates[i] * intensity + config.background_rate, config.dead_time_s);
        scan.signal[i] = poisson(dwell * recorded, rs);
        scan.monitor[i] = poisson(dwell * dead_time_rate(config.monitor_rate * intensity, config.dead_time_s), rm);
        scan.background[i] = poisson(dwell * dead_time_rate(config.background_rate, config.dead_time_s), rb);
    }
    return scan;
}

EstimatedDensity normalize_scan(const ScanRecord& scan) {
    EstimatedDensity out;
    out.positions_um = scan.positions_um;
    out.step_um = scan.step_um();
    net_counts(scan, out.net, out.net_error);
    out.total_net = std::accumulate(out.net.begin(), out.net.end(), 0.0);
    out.normalized = out.total_net > 0.0;
    const double scale = out.normalized ? 1.0 / (out.total_net * out.step_um) : 1.0;
    out.density.resize(out.net.size());
    out.error.resize(out.net.size());
    for (std::size_t i = 0; i < out.net.size(); ++i) {
        out.density[i] = out.net[i] * scale;
        out.error[i] = out.net_error[i] * scale;
    }
    return out;
}

ScanProbability interval_probability_from_scan(const ScanRecord& scan, double center_um, double width_um) {
    if (!(width_um > 0.0)) throw InvalidArgument("interval width must be positive");
    std::vector<double> net, err;
    net_counts(scan, net, err);
    const double step = scan.step_um();
    const GridSpec bins(scan.positions_um.front(), step, scan.size());
    const double a = center_um - 0.5 * width_um;
    const double b = center_um + 0.5 * width_um;
    if (!bins.contains_interval(a, b)) {
        throw IntervalOutsideScan("interval [" + std::to_string(a) + ", " + std::to_string(b) + "] um outside the scan");
    }
    double inside = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        inside += net[i] * bins.coverage(i, a, b);
        total += net[i];
    }
    if (!(total > 0.0)) throw InvalidArgument("scan has no net counts");
    const double p = inside / total;
    const double pc = std::clamp(p, 0.0, 1.0);
    return ScanProbability{p, std::sqrt(pc * (1.0 - pc) / total)};
}

void write_scan(const ScanRecord& scan, const std::filesystem::path& csv_path) {
    scan.validate();
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open " + csv_path.string() + " for writing");
    out << "position_um,signal,monitor,background\n";
    char line[128];
    for (std::size_t i = 0; i < scan.size(); ++i) {
        std::snprintf(line, sizeof line, "%.6f,%lld,%lld,%lld\n", scan.positions_um[i],
                      static_cast<long long>(scan.signal[i]), static_cast<long long>(scan.monitor[i]),
                      static_cast<long long>(scan.background[i]));
        out << line;
    }
    if (!out) throw IoError("failed writing " + csv_path.string());
    const nlohmann::json meta = {{"plane", plane_label(scan.plane)}, {"points", scan.size()}, {"config", config_json(scan.config)}};
    std::ofstream side(csv_path.string() + ".json");
    if (!side) throw IoError("cannot write sidecar for " + csv_path.string());
    side << meta.dump(2) << '\n';
}

ScanRecord read_scan(const std::filesystem::path& csv_path, std::optional<Plane> plane) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open " + csv_path.string());
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "position_um,signal,monitor,background") {
        throw IoError(csv_path.string() + ": expected header position_um,signal,monitor,background");
    }
    ScanRecord scan;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string f[4];
        for (auto& field : f) {
            if (!std::getline(ss, field, ',')) throw IoError(csv_path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
        }
        char* end = nullptr;
        const double x = std::strtod(f[0].c_str(), &end);
        if (end == f[0].c_str()) throw IoError(csv_path.string() + ":" + std::to_string(lineno) + ": bad position");
        scan.positions_um.push_back(x);
        for (int k = 1; k < 4; ++k) {
            const long long v = std::strtoll(f[k].c_str(), &end, 10);
            if (end == f[k].c_str()) throw IoError(csv_path.string() + ":" + std::to_string(lineno) + ": bad count");
            (k == 1 ? scan.signal : k == 2 ? scan.monitor : scan.background).push_back(v);
        }
    }
    const std::filesystem::path side = csv_path.string() + ".json";
    std::optional<Plane> found;
    if (std::filesystem::exists(side)) {
        std::ifstream js(side);
        nlohmann::json meta;
        try {
            js >> meta;
        } catch (const nlohmann::json::exception& e) {
            throw IoError("malformed sidecar " + side.string() + ": " + e.what());
        }
        if (meta.contains("config")) scan.config = config_from_json(meta["config"]);
        if (meta.contains("plane")) found = plane_from_label(meta["plane"].get<std::string>());
    }
    if (plane) found = plane;
    if (!found) throw MissingPlane(csv_path.string() + " has no plane label");
    scan.plane = *found;
    scan.validate();
    return scan;
}

}  // namespace phasepath
