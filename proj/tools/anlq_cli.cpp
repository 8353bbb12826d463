// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Exit codes: 0 success, 1 assertion failure,
// 2 configuration error, 3 numerical blow-up.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "anlq/scenarios.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw anlq::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral tensor/velocity simulator and kernel toolkit"};
    app.set_version_flag("--version", std::string(anlq::version_string));

    std::string scenario;
    std::string input;
    std::string out_dir;
    int workers = 0;
    long long seed = -1;

    app.add_option("scenario", scenario,
                   "run | linear-decay | kernel-probe | lower-bound | validate | fit")
        ->required()
        ->check(CLI::IsMember(
            {"run", "linear-decay", "kernel-probe", "lower-bound", "validate", "fit"}));
    app.add_option("config", input,
                   "config file (key=value sections); for fit, a CSV path is accepted");
    app.add_option("--out", out_dir, "output directory (default anlq_out/<scenario>)");
    app.add_option("--workers", workers, "worker threads (default: ANLQ_WORKERS or all cores)");
    app.add_option("--seed", seed, "override init.seed");

    CLI11_PARSE(app, argc, argv);

    try {
        int w = workers;
        if (w <= 0) {
            if (const char* env = std::getenv("ANLQ_WORKERS")) w = std::atoi(env);
        }
        if (w <= 0) w = int(std::thread::hardware_concurrency());
        anlq::Grid::set_workers(std::max(1, w));

        anlq::RunConfig cfg;
        if (!input.empty()) {
            if (scenario == "fit" && ends_with(input, ".csv")) {
                cfg.scenario.fit_csv = input;
            } else {
                cfg = anlq::parse_config(read_file(input));
            }
        } else if (scenario == "run") {
            throw anlq::ConfigError("scenario 'run' requires a config file");
        }
        cfg.scenario.name = scenario;
        if (seed >= 0) cfg.init.seed = std::uint64_t(seed);
        if (out_dir.empty()) out_dir = "anlq_out/" + scenario;

        const int code = anlq::scenario_dispatch(cfg, out_dir);
        if (code == 0)
            std::cout << scenario << ": ok (artifacts in " << out_dir << ")\n";
        else
            std::cerr << scenario << ": FAILED (see report in " << out_dir << ")\n";
        return code;
    } catch (const anlq::BlowUpError& e) {
        std::cerr << "numerical blow-up: " << e.what() << "\n";
        return 3;
    } catch (const anlq::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const anlq::SeriesError& e) {
        std::cerr << "series error: " << e.what() << "\n";
        return 2;
    } catch (const anlq::SnapshotError& e) {
        std::cerr << "snapshot error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
