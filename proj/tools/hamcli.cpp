#include <CLI11.hpp>

#include <iostream>

#include "ham/cli.hpp"
#include "ham/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic Anderson model numerics"};
    std::string command, config;
    std::string out_dir;
    unsigned long long seed = 0;
    unsigned threads = 0;
    std::vector<std::string> sets;
    std::string choices;
    for (const auto& c : ham::cli_commands()) choices += (choices.empty() ? "" : ", ") + c;
    app.add_option("command", command, "One of: " + choices)->required();
    app.add_option("--config", config, "Scenario config file");
    app.add_option("--out", out_dir, "Output directory (overrides out.dir)");
    app.add_option("--seed", seed, "Monte Carlo seed (overrides mc.seed)");
    app.add_option("--threads", threads, "Worker threads, 0 = hardware concurrency");
    app.add_option("--set", sets, "key=value override, repeatable")->take_all();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ham::kExitConfig;
    }
    ham::set_thread_count(threads);
    if (!out_dir.empty()) sets.push_back("out.dir=" + out_dir);
    if (seed) sets.push_back("mc.seed=" + std::to_string(seed));
    return ham::run(command, config, sets, std::cout, std::cerr);
}
