// Command-line front end: wires the driving, map, transfer, oseledets and
// markov layers into reproducible experiments emitting plot-ready CSV.
//
// Exit codes: 0 = all acceptance checks passed, 1 = a check failed,
// 2 = configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "metastable/experiment.hpp"

namespace {

using metastable::CommandResult;
using metastable::ExperimentConfig;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")
        ->required();
    cmd->add_option("--out", opts.out_dir, "output directory for CSV artifacts");
    cmd->add_option("--threads", opts.threads, "worker threads for sweep cells")
        ->check(CLI::PositiveNumber);
}

int run(const CommonOpts& opts,
        const std::function<CommandResult(const ExperimentConfig&)>& fn) {
    try {
        const ExperimentConfig cfg = ExperimentConfig::from_file(opts.config_path);
        const CommandResult r = fn(cfg);
        if (!r.message.empty()) std::cout << r.message;
        return r.exit_code;
    } catch (const metastable::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const metastable::validation_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random metastable interval-map cocycle laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;
    int rc = 0;

    auto* phi = app.add_subcommand(
        "phi-converge", "invariant-density convergence sweep (phi_converge.csv)");
    add_common(phi, opts);
    phi->callback([&] {
        rc = run(opts, [&](const ExperimentConfig& c) {
            return metastable::cmd_phi_converge(c, opts.out_dir, opts.threads);
        });
    });

    auto* psi = app.add_subcommand(
        "psi-converge", "second Oseledets function sweep (psi_converge.csv)");
    add_common(psi, opts);
    psi->callback([&] {
        rc = run(opts, [&](const ExperimentConfig& c) {
            return metastable::cmd_psi_converge(c, opts.out_dir, opts.threads);
        });
    });

    auto* lam = app.add_subcommand("lambda2",
                                   "Lyapunov exponent sweep (lambda2.csv)");
    add_common(lam, opts);
    lam->callback([&] {
        rc = run(opts, [&](const ExperimentConfig& c) {
            return metastable::cmd_lambda2(c, opts.out_dir, opts.threads);
        });
    });

    auto* mk = app.add_subcommand(
        "markov", "random-environment chain limits vs v0 (markov.csv)");
    add_common(mk, opts);
    mk->callback([&] {
        rc = run(opts, [&](const ExperimentConfig& c) {
            return metastable::cmd_markov(c, opts.out_dir);
        });
    });

    auto* ly = app.add_subcommand("ly-check",
                                  "iterated variation inequality check (ly_check.csv)");
    add_common(ly, opts);
    ly->callback([&] {
        rc = run(opts, [&](const ExperimentConfig& c) {
            return metastable::cmd_ly_check(c, opts.out_dir);
        });
    });

    auto* pi = app.add_subcommand(
        "pi-check", "weight series vs recursion oracle (pi_check.csv)");
    add_common(pi, opts);
    pi->callback([&] {
        rc = run(opts, [&](const ExperimentConfig& c) {
            return metastable::cmd_pi_check(c, opts.out_dir);
        });
    });

    CLI11_PARSE(app, argc, argv);
    return rc;
}
