// fiberheom_main.cpp — command-line front end.
//
// fiberheom <decay|map|dd|dd-map|validate> --config <path>
//           [--out <path>] [--workers N] [--nc N] [--dt X]
//
// Exit codes: 0 success, 1 validation failure or runtime error, 2 usage error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fiberheom/config.hpp"
#include "fiberheom/runners.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_path;
    int workers = -1;
    int n_c = -1;
    double dt = 0.0;
};

void add_common(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON configuration file")->required();
    cmd->add_option("--out", opt.out_path, "output CSV path (overrides config output_path)");
    cmd->add_option("--workers", opt.workers, "worker thread count (0 = all cores)");
    cmd->add_option("--nc", opt.n_c, "hierarchy truncation level override");
    cmd->add_option("--dt", opt.dt, "integrator base step override, us");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement decay and dynamical-decoupling simulator for birefringent fibers"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App* decay = app.add_subcommand("decay", "single entanglement-decay trajectory");
    CLI::App* map = app.add_subcommand("map", "(eta, L_c) threshold-distance map");
    CLI::App* dd = app.add_subcommand("dd", "trajectory with a pulse schedule");
    CLI::App* dd_map = app.add_subcommand("dd-map", "(eta, L_c) DD comparison map");
    CLI::App* validate = app.add_subcommand("validate", "engine-vs-oracle validation");
    for (CLI::App* cmd : {decay, map, dd, dd_map, validate}) add_common(cmd, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11's exit() prints help/errors; normalize failures to exit code 2.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        fiberheom::io::RunConfig cfg = fiberheom::io::load_config_file(opt.config_path);
        if (decay->parsed()) cfg.experiment = fiberheom::io::Experiment::Decay;
        if (map->parsed()) cfg.experiment = fiberheom::io::Experiment::Map;
        if (dd->parsed()) cfg.experiment = fiberheom::io::Experiment::DD;
        if (dd_map->parsed()) cfg.experiment = fiberheom::io::Experiment::DDMap;
        if (validate->parsed()) cfg.experiment = fiberheom::io::Experiment::Validate;

        // flags override config keys
        if (opt.workers >= 0) cfg.workers = opt.workers;
        if (opt.n_c >= 0) cfg.integrator.n_c = opt.n_c;
        if (opt.dt > 0.0) cfg.integrator.dt = opt.dt;
        if (!opt.out_path.empty()) cfg.output_path = opt.out_path;

        // re-check cross-field constraints the overrides may have broken
        if (cfg.experiment == fiberheom::io::Experiment::DD && !cfg.schedule) {
            throw std::invalid_argument("config: key 'schedule': required for the dd experiment");
        }
        if ((cfg.experiment == fiberheom::io::Experiment::Map ||
             cfg.experiment == fiberheom::io::Experiment::DDMap) &&
            !cfg.sweep) {
            cfg.sweep = fiberheom::io::default_sweep();
        }
        if (cfg.experiment == fiberheom::io::Experiment::DDMap && !cfg.schedule) {
            cfg.schedule = fiberheom::io::ScheduleSpec{};
        }

        return fiberheom::io::dispatch(cfg, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
