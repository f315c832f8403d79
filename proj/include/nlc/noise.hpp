#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nlc/fields.hpp"
#include "nlc/stokes_modes.hpp"

namespace nlc {

uint64_t splitmix64(uint64_t x);
/// Independent per-trajectory stream seed derived from (master seed, index).
uint64_t trajectory_seed(uint64_t master, uint64_t index);

/// Deterministic RNG: mt19937_64 bit stream with explicit Box-Muller
/// gaussians, so sequences are identical on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}
    double uniform();               // [0,1)
    double uniform(double a, double b);
    double gaussian();              // N(0,1)
    int poisson(double lambda);

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Spatial structure of the additive channel W0: modal expansion over the
/// first discrete Stokes eigenfields.
struct W0Modes {
    std::vector<VectorField2> phi;  // orthonormal eigenfields
    std::vector<double> rho;        // per-mode amplitudes
    std::vector<double> rates;      // A1 eigenvalues r_m
    int count() const { return int(phi.size()); }
};

W0Modes make_w0_modes(const Domain& dom, int count, std::vector<double> rho = {});

struct NoiseConfig {
    uint64_t seed = 1;
    double dt = 1e-3;
    int nsteps = 100;
    int k_channels = 1;  // multiplicative Brownian channels W_1..W_K
    int n_modes = 4;     // W0 modes
};

/// Pre-generated Gaussian increments for one trajectory.
struct NoisePath {
    uint64_t seed = 0;
    double dt = 0.0;
    int nsteps = 0;
    std::vector<std::vector<double>> dw;     // [k][n], N(0,dt)
    std::vector<std::vector<double>> dbeta;  // [m][n], N(0,dt)

    int channels() const { return int(dw.size()); }
    int modes() const { return int(dbeta.size()); }
    /// W_k(t_n) = sum of the first n increments.
    double w_at(int k, int n) const;
};

NoisePath generate_noise_path(const NoiseConfig& cfg);
void write_noise_path(const std::string& path, const NoisePath& np);
NoisePath read_noise_path(const std::string& path);

/// Exponential factor Q(t) = exp(sum_k sigma_k W_k(t)). q/q_inv are always
/// recomputed from the running sum, never by multiplicative updates.
struct QState {
    double t = 0.0;
    double w_sum = 0.0;
    double q = 1.0;
    double q_inv = 1.0;
};

QState advance_q(const QState& qs, const std::vector<double>& sigmas,
                 const std::vector<double>& dwk, double dt);

/// OU field Z(t) in modal coordinates over the W0 eigenfields; exact
/// per-mode exponential integrator with trapezoidal Q^{-1} over the step.
struct ZState {
    double t = 0.0;
    std::vector<double> zeta;
};

ZState step_z(const ZState& zs, const QState& q_left, const QState& q_right,
              const W0Modes& modes, double sigma0, double mu,
              const std::vector<double>& dbeta_n, double dt);
VectorField2 z_field(const ZState& zs, const W0Modes& modes, const Domain& dom);

/// Full per-step noise history of one trajectory (left endpoints at index n).
struct NoiseHistory {
    std::vector<QState> q;  // size nsteps+1
    std::vector<ZState> z;  // size nsteps+1
};

NoiseHistory build_noise_history(const NoisePath& np, const Params& p, const W0Modes& modes);

/// Malliavin direction: a (channel, time) kernel evaluation. channel 0 is the
/// W0 driver restricted to spatial mode `mode`; channels 1..K hit W_k.
struct MalliavinDirection {
    int channel = 1;
    double v = 0.0;
    int mode = 0;
};

/// D_v Q(s) = sigma_k Q(s) 1{v<=s}; D_v Q^{-1}(s) = -sigma_k Q^{-1}(s) 1{v<=s}.
double malliavin_q(const QState& qs_at_s, const std::vector<double>& sigmas,
                   const MalliavinDirection& dir);
double malliavin_qinv(const QState& qs_at_s, const std::vector<double>& sigmas,
                      const MalliavinDirection& dir);

/// Per-mode coefficients of D_v Z at every stored time: out[n][m]. Exactly
/// zero for t_n < v; discretization matches step_z (left-frozen Q).
std::vector<std::vector<double>> malliavin_z_coeffs(const NoisePath& np,
                                                    const NoiseHistory& hist, const Params& p,
                                                    const W0Modes& modes,
                                                    const MalliavinDirection& dir);

/// Compound Poisson boundary process N(t) for the director boundary data.
/// Jumps are random combinations of a fixed library of smooth traces.
inline constexpr int kTraceLibrarySize = 4;

struct BoundaryTrace {
    double c[3][kTraceLibrarySize] = {};  // [component][library index]
    bool zero() const;
};

/// Evaluates the trace library combination at a physical point.
void eval_boundary_trace(const BoundaryTrace& tr, double x, double y, double out[3]);

struct JumpBoundary {
    double rate = 0.0;
    double amp = 0.0;  // coefficients uniform on [-amp, amp]
    double t = 0.0;
    std::vector<double> jump_times;
    std::vector<BoundaryTrace> jumps;
    BoundaryTrace total;  // N(t), right-continuous
};

JumpBoundary step_jump_boundary(const JumpBoundary& jb, double t0, double t1, Rng& rng);

}  // namespace nlc
