#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "nlc/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    double dt = -1.0, t_end = -1.0;
    int nx = -1;
    long long seed = -1;
    std::string scheme, boundary_mode, out_dir;
    int snapshot_every = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--t-end", o.t_end, "final time");
    cmd->add_option("--nx", o.nx, "grid cells per side");
    cmd->add_option("--seed", o.seed, "master RNG seed");
    cmd->add_option("--scheme", o.scheme, "semi-implicit | fully-explicit");
    cmd->add_option("--boundary-mode", o.boundary_mode, "fixed | jump");
    cmd->add_option("--snapshot-every", o.snapshot_every, "steps between snapshots (0 = off)");
    cmd->add_option("--out", o.out_dir, "output directory");
}

nlc::RunConfig build_config(const CommonOpts& o) {
    nlc::RunConfig cfg = o.config_path.empty() ? nlc::default_run_config()
                                               : nlc::load_run_config(o.config_path);
    if (o.dt > 0) cfg.solver.dt = o.dt;
    if (o.t_end > 0) cfg.solver.t_end = o.t_end;
    if (o.nx > 0) cfg.domain = nlc::Domain(o.nx);
    if (o.seed >= 0) cfg.noise.seed = uint64_t(o.seed);
    if (!o.scheme.empty())
        cfg.solver.scheme = o.scheme == "fully-explicit"
                                ? nlc::SolverConfig::Scheme::fully_explicit
                                : nlc::SolverConfig::Scheme::semi_implicit;
    if (!o.boundary_mode.empty())
        cfg.solver.boundary_mode = o.boundary_mode == "jump"
                                       ? nlc::SolverConfig::BoundaryMode::jump
                                       : nlc::SolverConfig::BoundaryMode::fixed;
    if (o.snapshot_every >= 0) cfg.output.snapshot_every = o.snapshot_every;
    if (!o.out_dir.empty()) cfg.output.dir = o.out_dir;
    nlc::validate_run_config(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nlcsim: stochastic nematic liquid crystal flow simulator"};
    app.require_subcommand(1);

    CommonOpts sim_o;
    CLI::App* sim = app.add_subcommand("simulate", "run one seeded trajectory");
    add_common(sim, sim_o);

    CommonOpts ens_o;
    int n_traj = 8, workers = 0;
    CLI::App* ens = app.add_subcommand("ensemble", "run an ensemble of trajectories");
    add_common(ens, ens_o);
    ens->add_option("--n-traj", n_traj, "number of trajectories");
    ens->add_option("--workers", workers, "worker threads (0 = NLC_THREADS/auto)");

    CommonOpts sen_o;
    std::string mode = "frechet", direction_spec;
    bool fd_check = false;
    CLI::App* sen = app.add_subcommand("sensitivity", "tangent / Malliavin / anticipating runs");
    add_common(sen, sen_o);
    sen->add_option("--mode", mode, "frechet | malliavin | skorohod");
    sen->add_option("--direction-spec", direction_spec, "direction parameters (JSON object)");
    sen->add_flag("--fd-check", fd_check, "emit the finite-difference h-sweep table");

    std::string vop_out = "verify-out";
    CLI::App* vop = app.add_subcommand("verify-operators", "operator identity residual tables");
    vop->add_option("--out", vop_out, "output directory");

    std::string suite, ver_out = "verify-out";
    int ver_paths = 400, ver_workers = 0;
    CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("suite", suite, "operators | energy | frechet | malliavin | skorohod")
        ->required();
    ver->add_option("--out", ver_out, "output directory");
    ver->add_option("--paths", ver_paths, "Monte Carlo paths (skorohod suite)");
    ver->add_option("--workers", ver_workers, "worker threads (0 = NLC_THREADS/auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            nlc::SimulateResult r = nlc::run_simulate(build_config(sim_o));
            if (r.exit_code != 0)
                std::fprintf(stderr, "simulate failed: %s\n", r.message.c_str());
            else
                std::printf("wrote %s (%zu records)\n", r.diag_path.c_str(),
                            r.records.size());
            return r.exit_code;
        }
        if (ens->parsed()) {
            if (workers <= 0) workers = nlc::default_workers();
            nlc::EnsembleResult r = nlc::run_ensemble(build_config(ens_o), n_traj, workers);
            std::printf("wrote %s (%d trajectories, %zu failed)\n", r.merged_path.c_str(),
                        n_traj, r.failed.size());
            return r.exit_code;
        }
        if (sen->parsed()) {
            nlc::RunConfig cfg = build_config(sen_o);
            const std::string out = cfg.output.dir;
            return nlc::run_sensitivity(cfg, mode, direction_spec, fd_check, out);
        }
        if (vop->parsed()) {
            auto results = nlc::verify_operators_suite();
            for (const auto& r : results)
                std::printf("%-28s %12.5e (tol %g) %s\n", r.name.c_str(), r.value, r.tol,
                            r.pass ? "pass" : "FAIL");
            return nlc::write_verify_report("operators", results, vop_out);
        }
        if (ver->parsed()) {
            if (ver_workers <= 0) ver_workers = nlc::default_workers();
            std::vector<nlc::VerifyResult> results;
            if (suite == "operators")
                results = nlc::verify_operators_suite();
            else if (suite == "energy")
                results = nlc::verify_energy_suite();
            else if (suite == "frechet")
                results = nlc::verify_frechet_suite();
            else if (suite == "malliavin")
                results = nlc::verify_malliavin_suite();
            else if (suite == "skorohod")
                results = nlc::verify_skorohod_suite(ver_paths, ver_workers);
            else {
                std::fprintf(stderr, "unknown suite '%s'\n", suite.c_str());
                return 2;
            }
            for (const auto& r : results)
                std::printf("%-28s %12.5e (tol %g) %s\n", r.name.c_str(), r.value, r.tol,
                            r.pass ? "pass" : "FAIL");
            return nlc::write_verify_report(suite, results, ver_out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
