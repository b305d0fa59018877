// Batch front-end for the chain simulations: orbit | lyapunov | ensemble |
// sweep | theory. Configuration comes from a JSON file; any extra
// --key=value flags override config paths (e.g. --chain.U=25).

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bhchain/params.hpp"
#include "run/commands.hpp"
#include "run/config.hpp"
#include "run/outputs.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int workers = -1;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config_path, "JSON config file")->required();
    sub->add_option("--out", o.out_dir, "output directory (overrides config)");
    sub->add_option("--seed", o.seed, "master seed (overrides config)");
    sub->add_option("--workers", o.workers,
                    "worker threads (overrides config and BHCHAIN_WORKERS)");
    sub->allow_extras();  // --key=value config-path overrides
}

int run_sub(const CLI::App* sub, const CommonOpts& o,
            bhchain::run::ExperimentKind kind) {
    using namespace bhchain::run;
    std::vector<std::string> overrides = sub->remaining();
    RunConfig cfg;
    try {
        cfg = load_config(o.config_path, overrides);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bhchain: %s\n", e.what());
        if (!o.out_dir.empty()) write_failure_manifest(o.out_dir, e.what());
        return 1;
    }
    cfg.experiment = kind;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (o.workers >= 0) cfg.workers = o.workers;

    const CommandResult r = run_experiment(cfg);
    if (!r.message.empty()) std::fprintf(stderr, "bhchain: %s\n", r.message.c_str());
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiclassical Bose-Hubbard chain simulations"};
    app.set_version_flag("--version", std::string("bhchain ") + bhchain::kVersion);
    app.require_subcommand(1);

    CommonOpts orbit_o, lyap_o, ens_o, sweep_o, theory_o;
    CLI::App* orbit = app.add_subcommand("orbit", "integrate a single orbit");
    add_common(orbit, orbit_o);
    CLI::App* lyap = app.add_subcommand("lyapunov", "Lyapunov exponents over a grid");
    add_common(lyap, lyap_o);
    CLI::App* ens = app.add_subcommand("ensemble", "evolve an ensemble, fit exponents");
    add_common(ens, ens_o);
    CLI::App* swp = app.add_subcommand("sweep", "run an experiment over a (U, mu) grid");
    add_common(swp, sweep_o);
    CLI::App* thr = app.add_subcommand("theory", "closed-form predictions and oracles");
    add_common(thr, theory_o);

    CLI11_PARSE(app, argc, argv);

    using bhchain::run::ExperimentKind;
    if (orbit->parsed()) return run_sub(orbit, orbit_o, ExperimentKind::Orbit);
    if (lyap->parsed()) return run_sub(lyap, lyap_o, ExperimentKind::Lyapunov);
    if (ens->parsed()) return run_sub(ens, ens_o, ExperimentKind::Ensemble);
    if (swp->parsed()) return run_sub(swp, sweep_o, ExperimentKind::Sweep);
    if (thr->parsed()) return run_sub(thr, theory_o, ExperimentKind::Theory);
    return 1;
}
