#include "phasepath/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

#include "phasepath/errors.hpp"

namespace phasepath {
namespace {

using Value = std::variant<double, bool, std::string>;

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

Value parse_value(std::string_view raw, int line, const std::string& field) {
    if (raw.empty()) throw ConfigError("missing value", line, field);
    if (raw.front() == '"') {
        std::string out;
        std::size_t i = 1;
        for (; i < raw.size() && raw[i] != '"'; ++i) {
            if (raw[i] == '\\' && i + 1 < raw.size()) ++i;
            out += raw[i];
        }
        if (i != raw.size() - 1) throw ConfigError("unterminated or trailing text after string", line, field);
        return out;
    }
    if (raw == "true") return true;
    if (raw == "false") return false;
    std::string digits;
    for (char c : raw) {
        if (c != '_') digits += c;
    }
    char* end = nullptr;
    const double v = std::strtod(digits.c_str(), &end);
    if (digits.empty() || end != digits.c_str() + digits.size() || !std::isfinite(v)) {
        throw ConfigError("cannot parse value '" + std::string(raw) + "'", line, field);
    }
    return v;
}

struct Setter {
    std::function<void(const Value&, int, const std::string&)> apply;
};

double as_number(const Value& v, int line, const std::string& field) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw ConfigError("expected a number", line, field);
}

bool as_bool(const Value& v, int line, const std::string& field) {
    if (const bool* b = std::get_if<bool>(&v)) return *b;
    throw ConfigError("expected true or false", line, field);
}

std::string as_string(const Value& v, int line, const std::string& field) {
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError("expected a quoted string", line, field);
}

long long as_integer(const Value& v, int line, const std::string& field) {
    const double d = as_number(v, line, field);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError("expected an integer", line, field);
    return static_cast<long long>(d);
}

StateKind parse_kind(const std::string& s, int line, const std::string& field) {
    for (StateKind k : {StateKind::mixture, StateKind::pure, StateKind::position_box, StateKind::momentum_box,
                        StateKind::gaussian}) {
        if (state_kind_label(k) == s) return k;
    }
    throw ConfigError("unknown state kind '" + s + "' (mixture, pure, position_box, momentum_box, gaussian)", line, field);
}

std::map<std::string, Setter> setters(RunConfig& c) {
    std::map<std::string, Setter> m;
    auto number = [&m](const std::string& key, double& target) {
        m[key] = {[&target](const Value& v, int l, const std::string& f) { target = as_number(v, l, f); }};
    };
    auto flag = [&m](const std::string& key, bool& target) {
        m[key] = {[&target](const Value& v, int l, const std::string& f) { target = as_bool(v, l, f); }};
    };
    auto integer = [&m](const std::string& key, int& target) {
        m[key] = {[&target](const Value& v, int l, const std::string& f) {
            const long long x = as_integer(v, l, f);
            if (x < 1 || x > 100000) throw ConfigError("must lie in [1, 100000]", l, f);
            target = static_cast<int>(x);
        }};
    };

    m["state.kind"] = {[&c](const Value& v, int l, const std::string& f) { c.state.kind = parse_kind(as_string(v, l, f), l, f); }};
    number("state.w_L", c.state.weights.w_L);
    number("state.w_B", c.state.weights.w_B);
    number("state.w_inter", c.state.weights.w_inter);
    number("state.gaussian_width_um", c.state.gaussian_width_um);

    number("lab.wavelength_m", c.lab.wavelength);
    number("lab.slit_width_m", c.lab.slit_width_d);
    number("lab.focal_length_m", c.lab.focal_length_f);

    number("detector.slit_width_um", c.detector.slit_width_um);
    number("detector.step_um", c.detector.step_um);
    number("detector.dwell_time_s", c.detector.dwell_time_s);
    number("detector.signal_rate_peak_per_s", c.detector.signal_rate_peak);
    number("detector.monitor_rate_per_s", c.detector.monitor_rate);
    number("detector.background_rate_per_s", c.detector.background_rate);
    number("detector.dead_time_s", c.detector.dead_time_s);
    number("detector.intensity_noise", c.detector.intensity_noise);
    number("detector.scan_start_um", c.span.start_um);
    number("detector.scan_stop_um", c.span.stop_um);
    m["detector.seed"] = {[&c](const Value& v, int l, const std::string& f) {
        const long long x = as_integer(v, l, f);
        if (x < 0) throw ConfigError("seed must be non-negative", l, f);
        c.detector.rng_seed = static_cast<std::uint64_t>(x);
    }};

    number("analysis.L_um", c.analysis.L_um);
    number("analysis.B_um", c.analysis.B_um);
    number("analysis.M_um", c.analysis.M_um);
    number("analysis.nominal_overlap_sq", c.analysis.nominal_overlap_sq);
    m["analysis.excluded_half_width_um"] = {[&c](const Value& v, int l, const std::string& f) {
        const double w = as_number(v, l, f);
        if (!(w >= 0.0)) throw ConfigError("must be non-negative", l, f);
        c.analysis.tail.excluded_window = {-w, w};
    }};
    m["analysis.initial_min_guess_um"] = {[&c](const Value& v, int l, const std::string& f) {
        const double g = as_number(v, l, f);
        if (!(g > 0.0)) throw ConfigError("must be positive", l, f);
        c.analysis.tail.initial_min_guess = g;
        c.analysis.envelope.initial_min_guess = g;
    }};
    m["analysis.correct_span"] = {[&c](const Value& v, int l, const std::string& f) {
        c.analysis.tail.correct_span = c.analysis.envelope.correct_span = as_bool(v, l, f);
    }};
    integer("analysis.fringe_neighborhood", c.analysis.envelope.neighborhood);
    number("analysis.fringe_min_contrast", c.analysis.envelope.min_contrast);
    number("analysis.clip_sigma", c.analysis.envelope.clip_sigma);
    flag("analysis.strict_fits", c.analysis.strict_fits);
    number("analysis.certify_sigma", c.analysis.certify_sigma);

    integer("grid.cells_in_L", c.grid.cells_in_L);
    integer("grid.cells_in_B", c.grid.cells_in_B);
    integer("grid.wigner_cells_in_L", c.grid.wigner_cells_in_L);
    integer("grid.wigner_cells_in_B", c.grid.wigner_cells_in_B);
    m["grid.wigner_stride"] = {[&c](const Value& v, int l, const std::string& f) {
        const long long x = as_integer(v, l, f);
        if (x < 1) throw ConfigError("stride must be at least 1", l, f);
        c.grid.wigner_stride = static_cast<std::size_t>(x);
    }};
    return m;
}

void validate(const RunConfig& c, const std::map<std::string, int>& lines) {
    auto line_of = [&lines](const std::string& key) {
        const auto it = lines.find(key);
        return it == lines.end() ? 0 : it->second;
    };
    auto wrap = [&](const std::string& field, const std::function<void()>& f) {
        try {
            f();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what(), line_of(field), field);
        }
    };
    if (c.state.kind == StateKind::mixture) wrap("state.w_inter", [&] { c.state.weights.validate(); });
    if (!(c.state.gaussian_width_um > 0.0)) throw ConfigError("must be positive", line_of("state.gaussian_width_um"), "state.gaussian_width_um");
    wrap("lab.slit_width_m", [&] { c.lab.validate(); });
    wrap("detector.dwell_time_s", [&] { c.detector.validate(); });
    if (!(c.span.stop_um > c.span.start_um)) {
        throw ConfigError("scan_stop_um must exceed scan_start_um", line_of("detector.scan_stop_um"), "detector.scan_stop_um");
    }
    if (!(c.analysis.L_um > 0.0) || !(c.analysis.B_um > 0.0)) {
        throw ConfigError("intervals must be positive", line_of("analysis.L_um"), "analysis.L_um");
    }
    if (std::abs(c.analysis.M_um - c.analysis.L_um - c.analysis.B_um) > 1e-9 * c.analysis.M_um) {
        throw ConfigError("M_um must equal L_um + B_um (straight-line spread at t_M)", line_of("analysis.M_um"), "analysis.M_um");
    }
    if (!(c.analysis.nominal_overlap_sq >= 0.0 && c.analysis.nominal_overlap_sq < 1.0)) {
        throw ConfigError("must lie in [0, 1)", line_of("analysis.nominal_overlap_sq"), "analysis.nominal_overlap_sq");
    }
    const std::pair<const char*, int> cells[] = {{"grid.cells_in_L", c.grid.cells_in_L},
                                                 {"grid.cells_in_B", c.grid.cells_in_B},
                                                 {"grid.wigner_cells_in_L", c.grid.wigner_cells_in_L},
                                                 {"grid.wigner_cells_in_B", c.grid.wigner_cells_in_B}};
    for (const auto& [key, v] : cells) {
        if (v % 2 == 0) throw ConfigError("cell counts must be odd so the boxes centre on a sample", line_of(key), key);
    }
}

}  // namespace

StateKind state_kind_from_label(const std::string& label) { return parse_kind(label, 0, "state.kind"); }

std::string state_kind_label(StateKind kind) {
    switch (kind) {
        case StateKind::mixture: return "mixture";
        case StateKind::pure: return "pure";
        case StateKind::position_box: return "position_box";
        case StateKind::momentum_box: return "momentum_box";
        case StateKind::gaussian: return "gaussian";
    }
    return "unknown";
}

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    auto table = setters(c);
    std::map<std::string, int> seen;
    std::string section;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed table header", lineno);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "state" && section != "lab" && section != "detector" && section != "analysis" && section != "grid") {
                throw ConfigError("unknown table [" + section + "]", lineno, section);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key = value", lineno);
        const std::string key(trim(line.substr(0, eq)));
        if (section.empty()) throw ConfigError("key outside of a table", lineno, key);
        const std::string field = section + "." + key;
        const auto it = table.find(field);
        if (it == table.end()) throw ConfigError("unknown key", lineno, field);
        if (seen.count(field)) throw ConfigError("duplicate key", lineno, field);
        seen[field] = lineno;
        it->second.apply(parse_value(trim(line.substr(eq + 1)), lineno, field), lineno, field);
    }
    validate(c, seen);
    c.analysis.lab = c.lab;
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_toml(const RunConfig& c) {
    std::string out;
    auto num = [&](const char* key, double v) {
        // Shortest text that parses back to the same double.
        char buf[32];
        const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
        out += std::string(key) + " = " + std::string(buf, end) + "\n";
    };
    auto boolean = [&](const char* key, bool v) { out += std::string(key) + " = " + (v ? "true" : "false") + "\n"; };
    out += "[state]\nkind = \"" + state_kind_label(c.state.kind) + "\"\n";
    num("w_L", c.state.weights.w_L);
    num("w_B", c.state.weights.w_B);
    num("w_inter", c.state.weights.w_inter);
    num("gaussian_width_um", c.state.gaussian_width_um);
    out += "\n[lab]\n";
    num("wavelength_m", c.lab.wavelength);
    num("slit_width_m", c.lab.slit_width_d);
    num("focal_length_m", c.lab.focal_length_f);
    out += "\n[detector]\n";
    num("slit_width_um", c.detector.slit_width_um);
    num("step_um", c.detector.step_um);
    num("dwell_time_s", c.detector.dwell_time_s);
    num("signal_rate_peak_per_s", c.detector.signal_rate_peak);
    num("monitor_rate_per_s", c.detector.monitor_rate);
    num("background_rate_per_s", c.detector.background_rate);
    num("dead_time_s", c.detector.dead_time_s);
    num("intensity_noise", c.detector.intensity_noise);
    num("scan_start_um", c.span.start_um);
    num("scan_stop_um", c.span.stop_um);
    out += "seed = " + std::to_string(c.detector.rng_seed) + "\n";
    out += "\n[analysis]\n";
    num("L_um", c.analysis.L_um);
    num("B_um", c.analysis.B_um);
    num("M_um", c.analysis.M_um);
    num("nominal_overlap_sq", c.analysis.nominal_overlap_sq);
    num("excluded_half_width_um", c.analysis.tail.excluded_window.hi);
    num("initial_min_guess_um", c.analysis.tail.initial_min_guess);
    boolean("correct_span", c.analysis.tail.correct_span);
    num("fringe_neighborhood", c.analysis.envelope.neighborhood);
    num("fringe_min_contrast", c.analysis.envelope.min_contrast);
    num("clip_sigma", c.analysis.envelope.clip_sigma);
    boolean("strict_fits", c.analysis.strict_fits);
    num("certify_sigma", c.analysis.certify_sigma);
    out += "\n[grid]\n";
    num("cells_in_L", c.grid.cells_in_L);
    num("cells_in_B", c.grid.cells_in_B);
    num("wigner_cells_in_L", c.grid.wigner_cells_in_L);
    num("wigner_cells_in_B", c.grid.wigner_cells_in_B);
    num("wigner_stride", static_cast<double>(c.grid.wigner_stride));
    return out;
}

}  // namespace phasepath
