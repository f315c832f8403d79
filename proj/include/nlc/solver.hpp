#pragma once

#include <memory>

#include "nlc/lift.hpp"
#include "nlc/noise.hpp"
#include "nlc/operators.hpp"

namespace nlc {

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    enum class Scheme { semi_implicit, fully_explicit };
    enum class BoundaryMode { fixed, jump };
    Scheme scheme = Scheme::semi_implicit;
    BoundaryMode boundary_mode = BoundaryMode::fixed;
    double theta = 1.0;        // implicitness weight for the linear terms
    double cfl_safety = 0.9;   // guard for the fully explicit scheme

    int steps() const { return int(t_end / dt + 0.5); }
};

void validate_solver_config(const SolverConfig& cfg, const Domain& dom, const Params& p);

/// Transformed state: (u, d) of the pathwise random PDE plus the data needed
/// to reconstruct v = Q (u + Z) and the director boundary handling.
struct SimState {
    double t = 0.0;
    VectorField2 u;
    DirectorField3 d;
    QState q;
    ZState z;
    DirectorField3 lift;  // harmonic extension of the current boundary ring
    DirectorField3 rd;    // fixed part R_d of the boundary data (full field)
};

/// Shared prefactorized solves for one (domain, params, dt) combination.
struct SolverWorkspace {
    Domain dom;
    LerayWorkspace leray;
    W0Modes modes;
    std::unique_ptr<MacHelmholtz> helm_u;   // (I + theta dt mu (-Lap)) scaled
    std::unique_ptr<NodalHelmholtz> helm_d; // (I + theta dt gamma (-Lap)) scaled
    double dt = 0.0, mu = 0.0, gamma = 0.0, theta = 1.0;

    SolverWorkspace(const Domain& d, const Params& p, const SolverConfig& cfg, int w0_count);
};

/// Initial transformed state from physical data (v0, d0): u = v0 (Q(0)=1,
/// Z(0)=0), lift from d0's boundary ring.
SimState make_initial_state(const VectorField2& v0, const DirectorField3& d0,
                            const W0Modes& modes);

/// One step of the transformed pathwise PDE. `n` is the
/// step index into the noise path/history; noise states at n are the left
/// endpoint. Throws numerical_error on NaN (caller dumps state).
SimState step_transformed(const SimState& s, const NoisePath& np, const NoiseHistory& hist,
                          int n, const SolverWorkspace& ws, const SolverConfig& cfg,
                          const Params& p);

VectorField2 reconstruct_v(const SimState& s, const W0Modes& modes);

/// Heun predictor-corrector Stratonovich step on the untransformed system;
/// cross-validation oracle only. Fully explicit (CFL-guarded).
void step_stratonovich_direct(VectorField2& v, DirectorField3& d, const NoisePath& np, int n,
                              const SolverWorkspace& ws, const SolverConfig& cfg,
                              const Params& p);

/// Replaces the boundary data by R_d + N(t+) and recomputes the lift;
/// interior director values are unchanged.
SimState apply_boundary_jump(const SimState& s, const BoundaryTrace& total);

}  // namespace nlc
