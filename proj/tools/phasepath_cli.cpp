// Command-line front end: reproduce, simulate, analyze, wigner.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phasepath/config.hpp"
#include "phasepath/errors.hpp"
#include "phasepath/pipeline.hpp"

namespace fs = std::filesystem;
using namespace phasepath;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "TOML configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Detector RNG seed (overrides the configuration)");
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

RunConfig resolve(const Common& c) {
    RunConfig config = c.config.empty() ? RunConfig{} : load_config(c.config);
    if (c.seed) config.detector.rng_seed = *c.seed;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-space simulation and analysis of slit propagation experiments"};
    app.require_subcommand(1);

    Common reproduce_opts, simulate_opts, analyze_opts, wigner_opts;
    auto* reproduce = app.add_subcommand("reproduce", "Run the acceptance checks and the full default pipeline");
    add_common(reproduce, reproduce_opts);

    auto* simulate = app.add_subcommand("simulate", "Simulate the detector scan of one plane");
    add_common(simulate, simulate_opts);
    std::string plane;
    simulate->add_option("--plane", plane, "t0_pos, t0_mom or tM")->required();

    auto* analyze = app.add_subcommand("analyze", "Analyze one scan per plane");
    add_common(analyze, analyze_opts);
    std::vector<std::string> scans;
    analyze->add_option("scans", scans, "Scan CSV files (plane taken from each sidecar)")
        ->required()
        ->expected(3)
        ->check(CLI::ExistingFile);

    auto* wigner = app.add_subcommand("wigner", "Wigner function and region integrals of the configured state");
    add_common(wigner, wigner_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*reproduce) return cmd_reproduce(resolve(reproduce_opts), reproduce_opts.out);
        if (*simulate) return cmd_simulate(resolve(simulate_opts), plane_from_label(plane), simulate_opts.out);
        if (*analyze) {
            return cmd_analyze(resolve(analyze_opts), std::vector<fs::path>(scans.begin(), scans.end()), analyze_opts.out);
        }
        if (*wigner) return cmd_wigner(resolve(wigner_opts), wigner_opts.out);
    } catch (const Error& e) {
        std::cerr << "phasepath: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "phasepath: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
