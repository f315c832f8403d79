#pragma once

#include "nlc/solver.hpp"

namespace nlc {

/// Full stored base trajectory for sensitivity replay.
struct BasePath {
    std::vector<SimState> states;  // size nsteps+1
    NoisePath np;
    NoiseHistory hist;
};

BasePath run_base_path(const SimState& s0, const NoisePath& np, const NoiseHistory& hist,
                       const SolverWorkspace& ws, const SolverConfig& cfg, const Params& p);

/// Frechet-tangent pair for an initial-data direction (u0, b0).
struct TangentState {
    double t = 0.0;
    VectorField2 u_hat;
    DirectorField3 d_hat;  // zero boundary ring
};

TangentState make_tangent_state(const VectorField2& u0, const DirectorField3& b0,
                                const LerayWorkspace& ws);

/// One step of the tangent system: the exact Jacobian of step_transformed at
/// the stored base state, so finite-difference checks see clean first order.
TangentState step_tangent(const TangentState& ts, const BasePath& base, int n,
                          const SolverWorkspace& ws, const SolverConfig& cfg, const Params& p);

/// Malliavin derivative pair (xi_v, eta_v) for a (channel, time) direction.
struct MalliavinState {
    double t = 0.0;
    VectorField2 xi;
    DirectorField3 eta;  // zero boundary ring
    MalliavinDirection dir;
};

MalliavinState make_malliavin_state(const Domain& dom, const MalliavinDirection& dir);

/// One step of the Malliavin system including the inhomogeneous D_vQ, D_vQinv
/// and D_vZ insertions. `dz` comes from malliavin_z_coeffs for the same
/// direction. States remain exactly zero while t < dir.v.
MalliavinState step_malliavin(const MalliavinState& ms, const BasePath& base,
                              const std::vector<std::vector<double>>& dz, int n,
                              const SolverWorkspace& ws, const SolverConfig& cfg,
                              const Params& p);

}  // namespace nlc
