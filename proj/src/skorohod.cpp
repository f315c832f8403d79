#include "nlc/skorohod.hpp"

#include <cmath>
#include <thread>

#include "nlc/lift.hpp"
#include "nlc/norms.hpp"

namespace nlc {

SkorohodSample skorohod_sample(uint64_t seed, const Domain& dom, const Params& p,
                               const SolverConfig& cfg, const SkorohodSpec& spec,
                               const SolverWorkspace& ws) {
    if (p.channels() < 1) throw validation_error("skorohod_sample: needs channel W_1");
    if (spec.psi_mode < 0 || spec.psi_mode >= ws.modes.count())
        throw validation_error("skorohod_sample: psi mode out of range");

    NoiseConfig nc;
    nc.seed = seed;
    nc.dt = cfg.dt;
    nc.nsteps = cfg.steps();
    nc.k_channels = p.channels();
    nc.n_modes = ws.modes.count();
    NoisePath np = generate_noise_path(nc);
    NoiseHistory hist = build_noise_history(np, p, ws.modes);

    const int n1 = std::min(int(spec.t1 / cfg.dt + 0.5), np.nsteps);
    const double w1t1 = np.w_at(0, n1);
    const double amp = spec.deterministic ? spec.c : spec.c * w1t1;
    const double gprime = spec.deterministic ? 0.0 : spec.c;

    const VectorField2& psi = ws.modes.phi[size_t(spec.psi_mode)];
    VectorField2 v0 = psi;
    v0 *= amp;
    DirectorField3 d0 = director_boundary_preset(dom, "constant-z");
    SimState s = make_initial_state(v0, d0, ws.modes);
    BasePath base = run_base_path(s, np, hist, ws, cfg, p);
    TangentState ts = make_tangent_state(psi, DirectorField3(dom), ws.leray);

    std::vector<double> fvals(size_t(np.nsteps) + 1, 0.0);
    std::vector<double> dvals(size_t(np.nsteps) + 1, 0.0);
    for (int n = 0; n <= np.nsteps; ++n) {
        fvals[size_t(n)] = base.hist.q[size_t(n)].q * inner_h(base.states[size_t(n)].u, psi);
        if (!spec.deterministic) {
            dvals[size_t(n)] = inner_h(ts.u_hat, psi);
            if (n < np.nsteps) ts = step_tangent(ts, base, n, ws, cfg, p);
        }
    }

    const double sigma1 = p.sigmas[0];
    SkorohodSample out;
    for (int n = 0; n < np.nsteps; ++n) {
        const double dw = np.dw[0][size_t(n)];
        out.strat += 0.5 * (fvals[size_t(n)] + fvals[size_t(n) + 1]) * dw;
        out.ito_left += fvals[size_t(n)] * dw;
        out.trace += 0.5 * sigma1 * fvals[size_t(n)] * cfg.dt;
        if (n < n1)
            out.corr += base.hist.q[size_t(n)].q * gprime * dvals[size_t(n)] * cfg.dt;
    }
    return out;
}

SkorohodEstimate skorohod_check(const Domain& dom, const Params& p, const SolverConfig& cfg,
                                const SkorohodSpec& spec, int n_paths, uint64_t master_seed,
                                int workers) {
    if (n_paths < 2) throw validation_error("skorohod_check: need at least 2 paths");
    workers = std::max(1, workers);

    std::vector<SkorohodSample> samples(size_t(n_paths), SkorohodSample{});
    auto work = [&](int wi) {
        // each worker owns its factorization state; indices are strided so
        // the merged result is independent of the worker count
        SolverWorkspace ws(dom, p, cfg, 4);
        for (int i = wi; i < n_paths; i += workers)
            samples[size_t(i)] =
                skorohod_sample(trajectory_seed(master_seed, uint64_t(i)), dom, p, cfg, spec, ws);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int wi = 0; wi < workers; ++wi) pool.emplace_back(work, wi);
        for (auto& th : pool) th.join();
    }

    auto mean_se = [n_paths](auto&& f) {
        return [n_paths, f](const std::vector<SkorohodSample>& ss) {
            double m = 0.0;
            for (const auto& s : ss) m += f(s);
            m /= n_paths;
            double v = 0.0;
            for (const auto& s : ss) {
                const double d = f(s) - m;
                v += d * d;
            }
            v /= double(n_paths - 1);
            return std::pair<double, double>(m, std::sqrt(v / n_paths));
        };
    };

    SkorohodEstimate est;
    est.n_paths = n_paths;
    auto lhs = mean_se([](const SkorohodSample& s) { return s.strat; })(samples);
    auto rhs = mean_se([](const SkorohodSample& s) { return s.trace + s.corr; })(samples);
    auto diff =
        mean_se([](const SkorohodSample& s) { return s.strat - s.trace - s.corr; })(samples);
    est.lhs_mean = lhs.first;
    est.lhs_se = lhs.second;
    est.rhs_mean = rhs.first;
    est.rhs_se = rhs.second;
    est.diff_mean = diff.first;
    est.diff_se = diff.second;
    return est;
}

}  // namespace nlc
