#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phasepath/analysis.hpp"
#include "phasepath/config.hpp"
#include "phasepath/detector.hpp"
#include "phasepath/wigner.hpp"

namespace phasepath {

/// Lab-unit densities at the three measurement planes.
struct PlaneDensities {
    SampledDensity position;  ///< image plane, t = 0
    SampledDensity momentum;  ///< focal plane of the Fourier lens, f p / (hbar k)
    SampledDensity t_M;       ///< intermediate plane
    const SampledDensity& at(Plane plane) const;
};

PlaneDensities plane_densities(const BoxMixture& mixture, const LabParams& lab);
/// Same for a pure state given on the natural-unit position grid.
PlaneDensities plane_densities(const Wavefunction& psi, const LabParams& lab);
/// Densities of the configured state on the configured grid.
PlaneDensities plane_densities(const RunConfig& config);

/// Seed of the scan at `plane`, derived from the run seed.
std::uint64_t plane_seed(std::uint64_t seed, Plane plane);

ScanRecord simulate_plane(const PlaneDensities& densities, Plane plane, const DetectorConfig& detector,
                          const ScanSpan& span);
/// One scan per plane, in the order position, momentum, t_M.
std::vector<ScanRecord> simulate_planes(const PlaneDensities& densities, const DetectorConfig& detector,
                                        const ScanSpan& span);

/// Wigner function of the configured state on the Wigner grid.
WignerGrid configured_wigner(const RunConfig& config);

/// Region report for the detection intervals of the analysis section,
/// converted to natural units.
RegionReport configured_regions(const WignerGrid& w, const RunConfig& config);

struct WignerRun {
    WignerGrid grid;
    RegionReport regions;
    double W_origin = 0.0;
    std::vector<IdentityCheck> identities;
    bool ok() const;
};

WignerRun run_wigner(const RunConfig& config);
std::string wigner_report_json(const WignerRun& run, const RunConfig& config);

/// Gnuplot script laying out the three planes on linear and log scales,
/// reading `data_file` (columns position_um and one density per plane).
std::string plot_script(const std::string& data_file, const AnalysisReport* report);

/// Writes `densities.csv` with the estimated density of each scan.
void write_density_table(const std::vector<ScanRecord>& scans, const std::filesystem::path& path);

// Commands. Each writes into `out_dir` (created if needed) and returns the
// process exit code.

/// Scan CSV and sidecar for one plane.
int cmd_simulate(const RunConfig& config, Plane plane, const std::filesystem::path& out_dir);
/// analysis.json from three plane-labelled scan files; 0 iff every internal
/// identity holds.
int cmd_analyze(const RunConfig& config, const std::vector<std::filesystem::path>& scans,
                const std::filesystem::path& out_dir);
/// Wigner grid (CSV and binary) and region report; 0 iff the region
/// identities hold.
int cmd_wigner(const RunConfig& config, const std::filesystem::path& out_dir);
/// End-to-end reproduction report. The exit code has bit k-1 set when
/// acceptance criterion k fails.
int cmd_reproduce(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace phasepath
