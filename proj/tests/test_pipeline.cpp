#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

#include "phasepath/errors.hpp"
#include "phasepath/pipeline.hpp"

using namespace phasepath;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("phasepath_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("plane seeds are distinct and reproducible") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s : {0ull, 1ull, 2ull, 1ull << 40}) {
        for (Plane p : {Plane::t0_position, Plane::t0_momentum, Plane::t_M}) {
            CHECK(plane_seed(s, p) == plane_seed(s, p));
            seen.insert(plane_seed(s, p));
        }
    }
    CHECK(seen.size() == 12);
}

TEST_CASE("lab densities of the boxes") {
    RunConfig c;
    c.state.kind = StateKind::position_box;
    const PlaneDensities pos = plane_densities(c);
    CHECK(pos.position.total() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pos.position.integral(-25.0, 25.0) == doctest::Approx(1.0).epsilon(1e-9));

    c.state.kind = StateKind::momentum_box;
    const PlaneDensities mom = plane_densities(c);
    // Focal-plane image of the momentum box is one slit width wide.
    CHECK(mom.momentum.integral(-25.0, 25.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mom.t_M.total() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("simulate and analyze are byte-for-byte deterministic") {
    TempDir a("det_a"), b("det_b");
    RunConfig c;
    c.detector.rng_seed = 17;
    std::vector<fs::path> scans_a, scans_b;
    for (Plane p : {Plane::t0_position, Plane::t0_momentum, Plane::t_M}) {
        CHECK(cmd_simulate(c, p, a.path) == 0);
        CHECK(cmd_simulate(c, p, b.path) == 0);
        const std::string name = "scan_" + plane_label(p) + ".csv";
        CHECK(slurp(a.path / name) == slurp(b.path / name));
        CHECK(slurp(a.path / (name + ".json")) == slurp(b.path / (name + ".json")));
        scans_a.push_back(a.path / name);
        scans_b.push_back(b.path / name);
    }
    CHECK(cmd_analyze(c, scans_a, a.path) == 0);
    CHECK(cmd_analyze(c, scans_b, b.path) == 0);
    for (const char* f : {"analysis.json", "densities.csv", "figures.plt"}) {
        CAPTURE(f);
        CHECK(slurp(a.path / f) == slurp(b.path / f));
    }

    c.detector.rng_seed = 18;
    TempDir other("det_other");
    cmd_simulate(c, Plane::t0_position, other.path);
    CHECK(slurp(other.path / "scan_t0_pos.csv") != slurp(a.path / "scan_t0_pos.csv"));
}

TEST_CASE("analyze reports missing planes") {
    TempDir d("missing");
    RunConfig c;
    cmd_simulate(c, Plane::t0_position, d.path);
    const fs::path s = d.path / "scan_t0_pos.csv";
    CHECK_THROWS_AS(cmd_analyze(c, {s, s, s}, d.path), MissingPlane);
}

TEST_CASE("wigner command writes consistent outputs") {
    TempDir d("wigner");
    RunConfig c;
    c.state.kind = StateKind::pure;
    c.grid.wigner_stride = 16;
    CHECK(cmd_wigner(c, d.path) == 0);
    const WignerGrid w = read_wigner_binary(d.path / "wigner.bin");
    const WignerGrid direct = configured_wigner(c);
    CHECK(l1_distance(w, direct) == 0.0);
    const std::string json = slurp(d.path / "wigner_regions.json");
    CHECK(json.find("\"identities_hold\": true") != std::string::npos);

    const WignerRun run = run_wigner(c);
    CHECK(run.ok());
    CHECK(run.regions.W_out < 0.0);
    CHECK(run.W_origin > 0.0);
}

TEST_CASE("density table needs shared positions") {
    RunConfig c;
    const PlaneDensities d = plane_densities(c);
    const ScanRecord a = simulate_plane(d, Plane::t0_position, c.detector, c.span);
    ScanSpan narrow{-1000.0, 1000.0};
    const ScanRecord b = simulate_plane(d, Plane::t_M, c.detector, narrow);
    TempDir t("table");
    CHECK_THROWS_AS(write_density_table({a, b}, t.path / "densities.csv"), InvalidArgument);
}
