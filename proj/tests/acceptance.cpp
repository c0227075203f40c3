// Acceptance run: one PASS/FAIL line per criterion, followed by the checks
// behind it. Exit status has bit k-1 set when criterion k fails.

#include <cstdint>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "phasepath/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    phasepath::AcceptanceOptions options;
    std::vector<int> only;
    bool json = false;
    app.add_option("--seed", options.seed, "Seed for random states and simulated scans")->capture_default_str();
    app.add_option("--only", only, "Criteria to run (default: all)")->check(CLI::Range(1, 8));
    app.add_flag("--json", json, "Print the results as JSON instead");
    CLI11_PARSE(app, argc, argv);

    const auto results = phasepath::run_acceptance(options, only);
    int code = 0;
    for (const auto& r : results) {
        if (!json) std::cout << phasepath::format_criterion(r);
        if (!r.pass()) code |= 1 << (r.id - 1);
    }
    if (json) std::cout << phasepath::acceptance_json(results, true) << "\n";
    return code;
}
