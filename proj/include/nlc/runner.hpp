#pragma once

#include <string>
#include <vector>

#include "nlc/config.hpp"
#include "nlc/diagnostics.hpp"

namespace nlc {

inline constexpr const char* kCodeVersion = "1.0.0";

/// Worker count: NLC_THREADS if set, else hardware concurrency (capped at 8).
int default_workers();

struct SimulateResult {
    int exit_code = 0;
    std::string diag_path;
    std::string message;
    std::vector<DiagRecord> records;
};

/// One seeded trajectory: diagnostics CSV, optional snapshots, manifest.
/// Nonzero exit with a state + noise dump on numerical failure.
SimulateResult run_simulate(const RunConfig& cfg);

struct EnsembleResult {
    int exit_code = 0;
    std::string merged_path;
    std::vector<int> failed;  // trajectory indices that threw
};

/// n_traj seeded trajectories in parallel; merged output is independent of
/// the worker count (strided assignment, single writer).
EnsembleResult run_ensemble(const RunConfig& cfg, int n_traj, int workers);

struct VerifyResult {
    std::string name;
    double value = 0.0;  // measured residual / error / statistic
    double tol = 0.0;    // pinned threshold it is compared against
    bool pass = false;
    std::string detail;
};

std::vector<VerifyResult> verify_operators_suite();
std::vector<VerifyResult> verify_energy_suite();
std::vector<VerifyResult> verify_frechet_suite();
std::vector<VerifyResult> verify_malliavin_suite();
std::vector<VerifyResult> verify_skorohod_suite(int n_paths, int workers);

/// Writes report.json + report.csv under out_dir; returns 0 iff all pass.
int write_verify_report(const std::string& suite, const std::vector<VerifyResult>& results,
                        const std::string& out_dir);

/// `sensitivity` subcommand body. mode in {frechet, malliavin, skorohod};
/// direction_spec is a small JSON object, fd_check adds the h-sweep table.
int run_sensitivity(const RunConfig& cfg, const std::string& mode,
                    const std::string& direction_spec, bool fd_check,
                    const std::string& out_dir);

}  // namespace nlc
