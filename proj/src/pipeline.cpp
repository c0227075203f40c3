#include "phasepath/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "phasepath/acceptance.hpp"
#include "phasepath/errors.hpp"
#include "phasepath/inequality.hpp"
#include "phasepath/propagation.hpp"

namespace phasepath {
namespace {

constexpr double um_per_m = 1e6;

// The configured state: either the box decomposition or a wavefunction.
struct State {
    std::optional<BoxMixture> mixture;
    std::optional<Wavefunction> psi;
};

State configured_state(const RunConfig& c, int cells_in_L, int cells_in_B) {
    const NaturalUnits u = c.lab.natural();
    const GridSpec grid = aligned_grid(u.L, u.B, cells_in_L, cells_in_B);
    State s;
    switch (c.state.kind) {
    case StateKind::mixture:
        s.mixture.emplace(BoxPair::make(u, grid), c.state.weights);
        break;
    case StateKind::pure:
        s.psi = equal_superposition(u, grid);
        break;
    case StateKind::position_box:
        s.psi = make_box_position(u.L, grid);
        break;
    case StateKind::momentum_box:
        s.psi = make_box_momentum(u.B, grid).in(Representation::position);
        break;
    case StateKind::gaussian:
        s.psi = make_gaussian(grid, c.state.gaussian_width_um / (c.lab.length_unit() * um_per_m));
        break;
    }
    return s;
}

// Detection intervals of the analysis section in natural units.
struct Intervals {
    double L, B, t_M;
};

Intervals natural_intervals(const RunConfig& c) {
    const double d_um = c.lab.length_unit() * um_per_m;
    const double L = c.analysis.L_um / d_um;
    const double B = c.analysis.B_um / (c.lab.focal_scale() * d_um);
    return {L, B, (c.analysis.M_um / d_um - L) / B};
}

double window_probability(std::span<const double> density, const GridSpec& axis, double width) {
    return weighted_probability(density, axis.coverage_weights(-0.5 * width, 0.5 * width), axis.dx);
}

// Interval probabilities taken from the state itself, not the lattice.
PropagationTriple direct_triple(const State& s, const Intervals& iv) {
    const double M = iv.L + iv.B * iv.t_M;
    std::vector<double> x, p, m;
    GridSpec gx, gp;
    if (s.mixture) {
        x = s.mixture->position_density(0.0);
        p = s.mixture->momentum_density();
        m = s.mixture->position_density(iv.t_M);
        gx = s.mixture->grid();
    } else {
        x = s.psi->density();
        p = s.psi->in(Representation::momentum).density();
        m = propagate_free(*s.psi, iv.t_M).density();
        gx = s.psi->position_grid();
    }
    gp = gx.conjugate();
    return PropagationTriple::make(window_probability(x, gx, iv.L), window_probability(p, gp, iv.B), window_probability(m, gx, M),
                                   iv.L, iv.B, iv.t_M);
}

std::size_t nearest(const GridSpec& axis, double v) {
    const double i = std::round((v - axis.x_min) / axis.dx);
    return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(axis.n - 1)));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

AnalysisConfig analysis_config(const RunConfig& c) {
    AnalysisConfig a = c.analysis;
    a.lab = c.lab;
    return a;
}

std::filesystem::path scan_path(const std::filesystem::path& dir, Plane plane) {
    return dir / ("scan_" + plane_label(plane) + ".csv");
}

void write_analysis_outputs(const std::vector<ScanRecord>& scans, const AnalysisReport& report,
                            const std::filesystem::path& out_dir) {
    write_text(out_dir / "analysis.json", report_to_json(report) + "\n");
    write_density_table(scans, out_dir / "densities.csv");
    write_text(out_dir / "figures.plt", plot_script("densities.csv", &report));
}

const Plane kPlanes[3] = {Plane::t0_position, Plane::t0_momentum, Plane::t_M};

}  // namespace

const SampledDensity& PlaneDensities::at(Plane plane) const {
    switch (plane) {
    case Plane::t0_position: return position;
    case Plane::t0_momentum: return momentum;
    case Plane::t_M: return t_M;
    }
    throw InvalidArgument("unknown plane");
}

PlaneDensities plane_densities(const BoxMixture& mixture, const LabParams& lab) {
    const double d_um = lab.length_unit() * um_per_m;
    const GridSpec& g = mixture.grid();
    return {SampledDensity::from_natural(g, mixture.position_density(0.0), d_um),
            SampledDensity::from_natural(g.conjugate(), mixture.momentum_density(), lab.focal_scale() * d_um),
            SampledDensity::from_natural(g, mixture.position_density(lab.natural().t_M()), d_um)};
}

PlaneDensities plane_densities(const Wavefunction& psi, const LabParams& lab) {
    const double d_um = lab.length_unit() * um_per_m;
    const Wavefunction x = psi.in(Representation::position);
    const GridSpec& g = x.position_grid();
    return {SampledDensity::from_natural(g, x.density(), d_um),
            SampledDensity::from_natural(g.conjugate(), x.in(Representation::momentum).density(), lab.focal_scale() * d_um),
            SampledDensity::from_natural(g, propagate_free(x, lab.natural().t_M()).density(), d_um)};
}

PlaneDensities plane_densities(const RunConfig& config) {
    const State s = configured_state(config, config.grid.cells_in_L, config.grid.cells_in_B);
    return s.mixture ? plane_densities(*s.mixture, config.lab) : plane_densities(*s.psi, config.lab);
}

std::uint64_t plane_seed(std::uint64_t seed, Plane plane) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(plane) + 1u};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

ScanRecord simulate_plane(const PlaneDensities& densities, Plane plane, const DetectorConfig& detector, const ScanSpan& span) {
    DetectorConfig c = detector;
    c.rng_seed = plane_seed(detector.rng_seed, plane);
    ScanRecord scan = simulate_scan(densities.at(plane), c, span, plane);
    // The sidecar keeps the run seed; the plane seed follows from it.
    scan.config.rng_seed = detector.rng_seed;
    return scan;
}

std::vector<ScanRecord> simulate_planes(const PlaneDensities& densities, const DetectorConfig& detector, const ScanSpan& span) {
    std::vector<ScanRecord> out;
    for (Plane p : kPlanes) out.push_back(simulate_plane(densities, p, detector, span));
    return out;
}

WignerGrid configured_wigner(const RunConfig& config) {
    const State s = configured_state(config, config.grid.wigner_cells_in_L, config.grid.wigner_cells_in_B);
    return s.mixture ? wigner_from_mixture(s.mixture->weights(), s.mixture->boxes()) : wigner_from_pure(*s.psi);
}

RegionReport configured_regions(const WignerGrid& w, const RunConfig& config) {
    const Intervals iv = natural_intervals(config);
    return region_integrals(w, iv.L, iv.B, iv.t_M);
}

bool WignerRun::ok() const {
    return std::all_of(identities.begin(), identities.end(), [](const IdentityCheck& c) { return c.ok; });
}

WignerRun run_wigner(const RunConfig& config) {
    WignerGrid grid = configured_wigner(config);
    const RegionReport regions = configured_regions(grid, config);
    const double W_origin = grid.at(nearest(grid.p_axis(), 0.0), nearest(grid.x_axis(), 0.0));

    const State s = configured_state(config, config.grid.wigner_cells_in_L, config.grid.wigner_cells_in_B);
    const PropagationTriple direct = direct_triple(s, natural_intervals(config));
    auto check = [](std::string name, double residual, double tol) {
        return IdentityCheck{std::move(name), residual, tol, std::abs(residual) <= tol};
    };
    std::vector<IdentityCheck> ids = {
        check("wigner_integral", grid.integral() - 1.0, 1e-6),
        check("region_total", regions.total - 1.0, 1e-6),
        check("P_L_lattice_vs_state", regions.P_L - direct.P_L, 1e-6),
        check("P_B_lattice_vs_state", regions.P_B - direct.P_B, 1e-6),
        check("P_M_lattice_vs_state", regions.P_M - direct.P_M, 1e-6),
        check("defect_vs_wigner", defect_probability(direct) + regions.W_out + regions.W_diag, 1e-6),
    };
    return {std::move(grid), regions, W_origin, std::move(ids)};
}

std::string wigner_report_json(const WignerRun& run, const RunConfig& config) {
    const RegionReport& r = run.regions;
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& c : run.identities) {
        ids.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"ok", c.ok}});
    }
    const PropagationTriple t = triple_from_report(r);
    nlohmann::json j = {
        {"state", state_kind_label(config.state.kind)},
        {"lattice", {{"x_points", run.grid.x_axis().n}, {"p_points", run.grid.p_axis().n},
                     {"dx_nat", run.grid.x_axis().dx}, {"dp_nat", run.grid.p_axis().dx}}},
        {"intervals_nat", {{"L", r.L}, {"B", r.B}, {"t_M", r.t_M}, {"M", r.M}}},
        {"P_L", r.P_L},
        {"P_B", r.P_B},
        {"P_M", r.P_M},
        {"W_LB", r.W_LB},
        {"W_in", r.W_in},
        {"W_out", r.W_out},
        {"W_diag", r.W_diag},
        {"total", r.total},
        {"defect", defect_probability(t)},
        {"W_origin_nat", run.W_origin},
        {"W_min_nat", run.grid.min_value()},
        {"identities", ids},
        {"identities_hold", run.ok()},
    };
    return j.dump(2);
}

std::string plot_script(const std::string& data_file, const AnalysisReport* report) {
    std::ostringstream s;
    s << "# gnuplot script; run from the output directory\n"
         "set datafile separator ','\n"
         "set terminal pngcairo size 1500,900\n"
         "set output 'figures.png'\n"
         "set multiplot layout 2,3\n"
         "set xlabel 'position (um)'\n"
         "set ylabel 'density (1/um)'\n";
    const char* titles[3] = {"t = 0, position", "t = 0, momentum (focal plane)", "t = t_M"};
    const bool fits = report != nullptr && report->decomposition_ok;
    char buf[256];
    if (fits) s << "sinc2(x, h, x0) = x == 0 ? h : h * (sin(pi * x / x0) / (pi * x / x0))**2\n";
    for (int log = 0; log < 2; ++log) {
        s << (log ? "set logscale y\nset yrange [1e-7:*]\n" : "unset logscale y\nset yrange [*:*]\n");
        for (int k = 0; k < 3; ++k) {
            s << "set title '" << titles[k] << (log ? " (log)" : "") << "'\n";
            s << "plot '" << data_file << "' using 1:" << 2 + 2 * k << ":" << 3 + 2 * k
              << " with yerrorbars pt 7 ps 0.3 title 'measured'";
            if (fits && log && k < 2) {
                const SincFit& f = k == 0 ? report->fit_position : report->fit_momentum;
                std::snprintf(buf, sizeof buf, ", sinc2(x, %.8g, %.8g) title 'tail fit'", f.peak_height.value,
                              f.first_min_location.value);
                s << buf;
            }
            if (fits && k == 2) {
                std::snprintf(buf, sizeof buf, ", sinc2(x, %.8g, %.8g) title 'envelope'", report->envelope.height.value,
                              report->envelope.first_min_location.value);
                s << buf;
            }
            s << "\n";
        }
    }
    s << "unset multiplot\n";
    return s.str();
}

void write_density_table(const std::vector<ScanRecord>& scans, const std::filesystem::path& path) {
    if (scans.empty()) throw InvalidArgument("no scans to tabulate");
    std::vector<EstimatedDensity> est;
    for (const auto& scan : scans) {
        if (scan.positions_um != scans.front().positions_um) {
            throw InvalidArgument("scans do not share their positions");
        }
        est.push_back(normalize_scan(scan));
    }
    std::ostringstream s;
    s << "position_um";
    for (const auto& scan : scans) s << "," << plane_label(scan.plane) << "," << plane_label(scan.plane) << "_error";
    s << "\n";
    char buf[64];
    for (std::size_t i = 0; i < scans.front().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", scans.front().positions_um[i]);
        s << buf;
        for (const auto& e : est) {
            std::snprintf(buf, sizeof buf, ",%.10e,%.10e", e.density[i], e.error[i]);
            s << buf;
        }
        s << "\n";
    }
    write_text(path, s.str());
}

int cmd_simulate(const RunConfig& config, Plane plane, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const ScanRecord scan = simulate_plane(plane_densities(config), plane, config.detector, config.span);
    write_scan(scan, scan_path(out_dir, plane));
    return 0;
}

int cmd_analyze(const RunConfig& config, const std::vector<std::filesystem::path>& paths, const std::filesystem::path& out_dir) {
    std::vector<ScanRecord> scans;
    for (const auto& p : paths) scans.push_back(read_scan(p));
    std::filesystem::create_directories(out_dir);
    const AnalysisReport report = analyze_scans(scans, analysis_config(config));
    write_analysis_outputs(scans, report, out_dir);
    return report.identities_hold() ? 0 : 1;
}

int cmd_wigner(const RunConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const WignerRun run = run_wigner(config);
    write_wigner_csv(run.grid, out_dir / "wigner.csv", config.grid.wigner_stride);
    write_wigner_binary(run.grid, out_dir / "wigner.bin");
    write_text(out_dir / "wigner_regions.json", wigner_report_json(run, config) + "\n");
    return run.ok() ? 0 : 1;
}

int cmd_reproduce(const RunConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    AcceptanceOptions options;
    options.seed = config.detector.rng_seed;
    const std::vector<CriterionResult> results = run_acceptance(options);
    int code = 0;
    for (const auto& r : results) {
        std::cout << format_criterion(r);
        if (!r.pass()) code |= 1 << (r.id - 1);
    }
    write_text(out_dir / "reproduce.json", acceptance_json(results, false) + "\n");

    const std::vector<ScanRecord> scans = simulate_planes(plane_densities(config), config.detector, config.span);
    for (const auto& scan : scans) write_scan(scan, scan_path(out_dir, scan.plane));
    // The report is written even when a fit fails on this state.
    AnalysisConfig analysis = analysis_config(config);
    analysis.strict_fits = false;
    write_analysis_outputs(scans, analyze_scans(scans, analysis), out_dir);

    cmd_wigner(config, out_dir);
    return code;
}

}  // namespace phasepath
