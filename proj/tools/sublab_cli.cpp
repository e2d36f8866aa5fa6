// Command-line driver: runs scenario config files and writes CSV/JSON
// reports. Exit code 0 iff every scenario passed.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "sublab/scenario.hpp"

namespace {

int default_parallelism() {
    if (const char* env = std::getenv("SUBLAB_PARALLEL")) {
        const int k = std::atoi(env);
        if (k >= 1) return k;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sublab - numerical experiments for worst-case expectations"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = "out";
    std::string format = "csv";
    int parallel = default_parallelism();
    std::uint64_t seed = 0;

    CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario config file");
    run_cmd->add_option("config", config, "Scenario config (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (default: out)");
    run_cmd->add_option("--format", format, "Report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--parallel", parallel,
                        "Scenarios run concurrently (default: 1, or SUBLAB_PARALLEL)");
    run_cmd->add_option("--seed", seed, "Default seed for scenarios without one");

    CLI::App* kinds_cmd = app.add_subcommand("list-kinds", "List the scenario kinds");

    CLI11_PARSE(app, argc, argv);

    if (kinds_cmd->parsed()) {
        for (const std::string& k : sublab::scenario_kinds()) std::cout << k << "\n";
        return 0;
    }

    try {
        const std::vector<sublab::Scenario> scenarios = sublab::parse_scenarios(config);
        const std::vector<sublab::RunReport> reports =
            sublab::run(scenarios, parallel, seed);
        sublab::emit(reports, format, out_dir);
        int passed = 0, failed = 0, errored = 0;
        for (const sublab::RunReport& r : reports) {
            if (r.status == "pass")
                ++passed;
            else if (r.status == "fail")
                ++failed;
            else
                ++errored;
            std::cout << r.status << "\t" << r.scenario_id;
            if (!r.message.empty()) std::cout << "\t" << r.message;
            std::cout << "\n";
        }
        std::cout << passed << " passed, " << failed << " failed, " << errored
                  << " errored; reports in " << out_dir << "\n";
        return sublab::all_passed(reports) ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
