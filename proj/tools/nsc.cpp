// Command-line front end: one subcommand per experiment kind. Settings come
// from an optional config file, then from per-key flags, which win.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "nsc/config.hpp"
#include "nsc/errors.hpp"
#include "nsc/experiments.hpp"

int main(int argc, char** argv) {
    using nsc::cli::ExperimentConfig;

    CLI::App app{"Rotating compressible flow experiments"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        std::string config_path;
        std::map<std::string, std::string> values;
        bool print_config = false;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    const std::vector<std::pair<std::string, std::string>> kinds = {
        {"symbol", "closed-form quartic against the eigensolve on random frequencies"},
        {"linear-decay", "per-mode decay of the linear propagator"},
        {"strichartz", "space-time norm of one band of the linear flow over a list of rotation speeds"},
        {"simulate", "nonlinear run with snapshots and a time series"},
        {"norms", "simulate, then the energy and auxiliary norms on a time ladder"},
        {"apriori", "simulate, then both sides of the master inequalities"},
        {"sweep", "stability map over (Omega, eps) and seeds"},
        {"verify-all", "property suites at the configured grid"},
    };
    for (const auto& [name, help] : kinds) {
        auto sub = std::make_unique<Sub>();
        sub->app = app.add_subcommand(name, help);
        sub->app->add_option("-c,--config", sub->config_path, "key = value config file")->check(CLI::ExistingFile);
        sub->app->add_flag("--print-config", sub->print_config, "print the resolved config and exit");
        for (const auto& key : ExperimentConfig::keys()) {
            if (key == "kind") continue;
            sub->app->add_option("--" + key, sub->values[key], "override config key " + key);
        }
        subs.push_back(std::move(sub));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nsc::cli::kInvalidConfig;
    }

    for (const auto& sub : subs) {
        if (!sub->app->parsed()) continue;
        ExperimentConfig cfg;
        try {
            if (!sub->config_path.empty()) cfg = ExperimentConfig::load(sub->config_path);
            cfg.kind = nsc::cli::kind_from_string(sub->app->get_name());
            for (const auto& key : ExperimentConfig::keys()) {
                if (key == "kind") continue;
                if (sub->app->get_option("--" + key)->count() > 0) cfg.set(key, sub->values[key]);
            }
        } catch (const nsc::PreconditionError& e) {
            std::cerr << "invalid configuration: " << e.what() << '\n';
            return nsc::cli::kInvalidConfig;
        } catch (const nsc::IoError& e) {
            std::cerr << "i/o failure: " << e.what() << '\n';
            return nsc::cli::kIoFailure;
        }
        if (sub->print_config) {
            std::cout << "# config_hash: " << cfg.hash() << '\n' << cfg.canonical();
            return 0;
        }
        return nsc::cli::run(cfg, std::cout).exit_code;
    }
    return nsc::cli::kInvalidConfig;
}
