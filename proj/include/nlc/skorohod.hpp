#pragma once

#include "nlc/sensitivity.hpp"

namespace nlc {

/// Anticipating initial datum R_nu = g(W_1(t1)) psi with g(x) = c x, or a
/// deterministic R_nu = c psi (then the Malliavin correction vanishes).
struct SkorohodSpec {
    double c = 1.0;
    double t1 = 0.05;
    bool deterministic = false;
    int psi_mode = 0;  // index into the Stokes eigenfields
};

/// Per-path pieces of the Stratonovich-Skorohod identity, all paired with
/// the test field chi = psi:
///   strat    = midpoint sum of <Q u, chi> dW_1
///   ito_left = left-point sum of <Q u, chi> dW_1
///   trace    = (sigma_1/2) * int <Q u, chi> ds
///   corr     = int <Q * Du(s,R_nu)[D_s R_nu], chi> ds (left-endpoint rule)
struct SkorohodSample {
    double strat = 0.0;
    double ito_left = 0.0;
    double trace = 0.0;
    double corr = 0.0;
};

SkorohodSample skorohod_sample(uint64_t seed, const Domain& dom, const Params& p,
                               const SolverConfig& cfg, const SkorohodSpec& spec,
                               const SolverWorkspace& ws);

struct SkorohodEstimate {
    int n_paths = 0;
    double lhs_mean = 0.0, lhs_se = 0.0;    // E[strat]
    double rhs_mean = 0.0, rhs_se = 0.0;    // E[trace + corr] (E[skorohod] = 0)
    double diff_mean = 0.0, diff_se = 0.0;  // E[strat - trace - corr]
};

/// Monte Carlo check of the identity in expectation: the Skorohod term has
/// zero mean, so E[strat] must equal E[trace + corr].
SkorohodEstimate skorohod_check(const Domain& dom, const Params& p, const SolverConfig& cfg,
                                const SkorohodSpec& spec, int n_paths, uint64_t master_seed,
                                int workers);

}  // namespace nlc
