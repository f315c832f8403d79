#include "nlc/sensitivity.hpp"

#include <algorithm>
#include <cmath>

namespace nlc {

BasePath run_base_path(const SimState& s0, const NoisePath& np, const NoiseHistory& hist,
                       const SolverWorkspace& ws, const SolverConfig& cfg, const Params& p) {
    BasePath bp;
    bp.np = np;
    bp.hist = hist;
    bp.states.reserve(size_t(np.nsteps) + 1);
    bp.states.push_back(s0);
    SimState s = s0;
    for (int n = 0; n < np.nsteps; ++n) {
        s = step_transformed(s, np, hist, n, ws, cfg, p);
        bp.states.push_back(s);
    }
    return bp;
}

TangentState make_tangent_state(const VectorField2& u0, const DirectorField3& b0,
                                const LerayWorkspace& ws) {
    TangentState ts;
    ts.u_hat = ws.project(u0);
    ts.d_hat = b0;
    ts.d_hat.zero_boundary();
    return ts;
}

namespace {

VectorField2 skew_bilin(const VectorField2& a, const VectorField2& b) {
    VectorField2 s = advect(a, b);
    s -= advect_adjoint(a, b);
    s *= 0.5;
    return s;
}

// One linearized step of the transformed scheme around base state `s` with
// left-endpoint noise (qn, zf). `dw` is the perturbation of w = u + Z (state
// perturbation plus any D_vZ insertion); extra_* are inhomogeneous drifts.
void linearized_step(const VectorField2& dw, const VectorField2& uhat,
                     const DirectorField3& dhat, const VectorField2* extra_u,
                     const DirectorField3* extra_d, const SimState& s,
                     const VectorField2& zf, double qn, double qninv,
                     const SolverWorkspace& ws, const SolverConfig& cfg, const Params& p,
                     VectorField2& out_u, DirectorField3& out_d) {
    const double dt = cfg.dt;
    VectorField2 w = s.u + zf;

    VectorField2 lin_u = skew_bilin(dw, w);
    lin_u += skew_bilin(w, dw);
    lin_u *= qn;
    {
        VectorField2 m1 = m_stress_div(ws.leray, dhat, s.d);
        m1 += m_stress_div(ws.leray, s.d, dhat);
        m1 *= p.lambda * qninv;
        lin_u += m1;
    }
    if (extra_u) lin_u += *extra_u;

    DirectorField3 lin_d = advect_director(dw, s.d);
    lin_d += advect_director(w, dhat);
    lin_d *= qn;
    {
        DirectorField3 fp = gl_fprime_apply(s.d, dhat, GLParams{p.eta});
        fp *= p.gamma;
        // f' acts on interior perturbations only
        fp.zero_boundary();
        lin_d += fp;
    }
    if (extra_d) lin_d += *extra_d;

    if (cfg.scheme == SolverConfig::Scheme::semi_implicit) {
        VectorField2 rhs = uhat;
        {
            VectorField2 t = lin_u;
            t *= dt;
            rhs -= t;
        }
        if (cfg.theta < 1.0) {
            VectorField2 lap = neg_laplacian(uhat);
            lap *= (1.0 - cfg.theta) * dt * p.mu;
            rhs -= lap;
        }
        rhs *= 1.0 / (cfg.theta * dt * p.mu);
        out_u = ws.leray.project(ws.helm_u->solve(rhs));

        DirectorField3 lap1;
        if (cfg.theta < 1.0) lap1 = neg_laplacian(dhat);
        out_d = DirectorField3(ws.dom);
        const double c0 = 1.0 / (cfg.theta * dt * p.gamma);
        Array2 zero_bc(ws.dom.nx + 1, ws.dom.ny + 1);
        for (int k = 0; k < 3; ++k) {
            Array2 rhs_d(ws.dom.nx + 1, ws.dom.ny + 1);
            for (int j = 1; j < ws.dom.ny; ++j)
                for (int i = 1; i < ws.dom.nx; ++i) {
                    double r = dhat.comp(k)(i, j) - dt * lin_d.comp(k)(i, j);
                    if (cfg.theta < 1.0)
                        r -= (1.0 - cfg.theta) * dt * p.gamma * lap1.comp(k)(i, j);
                    rhs_d(i, j) = r * c0;
                }
            out_d.comp(k) = ws.helm_d->solve(rhs_d, zero_bc);
        }
    } else {
        VectorField2 rhs = uhat;
        VectorField2 lap = neg_laplacian(uhat);
        lap *= p.mu;
        lin_u += lap;
        lin_u *= dt;
        rhs -= lin_u;
        out_u = ws.leray.project(rhs);

        out_d = dhat;
        DirectorField3 lapd = neg_laplacian(dhat);
        lapd *= p.gamma;
        lin_d += lapd;
        lin_d *= dt;
        lin_d.zero_boundary();
        out_d -= lin_d;
    }
    if (!out_u.finite() || !out_d.finite())
        throw numerical_error("linearized step: NaN/Inf");
}

}  // namespace

TangentState step_tangent(const TangentState& ts, const BasePath& base, int n,
                          const SolverWorkspace& ws, const SolverConfig& cfg, const Params& p) {
    if (n < 0 || n >= base.np.nsteps) throw validation_error("step_tangent: step index range");
    const SimState& s = base.states[size_t(n)];
    if (std::abs(s.t - ts.t) > 1e-12 * std::max(1.0, std::abs(s.t)))
        throw validation_error("step_tangent: base path misaligned with tangent time");
    const QState& qn = base.hist.q[size_t(n)];
    VectorField2 zf = z_field(base.hist.z[size_t(n)], ws.modes, ws.dom);
    TangentState out;
    out.t = ts.t + cfg.dt;
    linearized_step(ts.u_hat, ts.u_hat, ts.d_hat, nullptr, nullptr, s, zf, qn.q, qn.q_inv, ws,
                    cfg, p, out.u_hat, out.d_hat);
    return out;
}

MalliavinState make_malliavin_state(const Domain& dom, const MalliavinDirection& dir) {
    MalliavinState ms;
    ms.xi = VectorField2(dom);
    ms.eta = DirectorField3(dom);
    ms.dir = dir;
    return ms;
}

MalliavinState step_malliavin(const MalliavinState& ms, const BasePath& base,
                              const std::vector<std::vector<double>>& dz, int n,
                              const SolverWorkspace& ws, const SolverConfig& cfg,
                              const Params& p) {
    if (n < 0 || n >= base.np.nsteps) throw validation_error("step_malliavin: step index range");
    MalliavinState out = ms;
    out.t = ms.t + cfg.dt;
    // the kernel direction only starts acting once the left endpoint carries
    // the perturbed increment; before that the state is exactly zero
    const int nv = std::clamp(int(std::floor(ms.dir.v / base.np.dt)), 0, base.np.nsteps - 1);
    if (n < nv) return out;  // state identically zero before the kernel time

    const SimState& s = base.states[size_t(n)];
    const QState& qn = base.hist.q[size_t(n)];
    VectorField2 zf = z_field(base.hist.z[size_t(n)], ws.modes, ws.dom);
    VectorField2 w = s.u + zf;

    const bool active = n >= nv + 1;  // left endpoint sees the kernel
    double dq = 0.0, dqinv = 0.0;
    if (active && ms.dir.channel >= 1) {
        dq = malliavin_q(qn, p.sigmas, ms.dir);
        dqinv = malliavin_qinv(qn, p.sigmas, ms.dir);
    }

    // D_vZ at the left endpoint, in modal coordinates
    VectorField2 dzf(ws.dom);
    for (int m = 0; m < ws.modes.count(); ++m) {
        const double c = dz[size_t(n)][size_t(m)];
        if (c != 0.0) {
            VectorField2 t = ws.modes.phi[size_t(m)];
            t *= c;
            dzf += t;
        }
    }

    VectorField2 dw = ms.xi + dzf;

    VectorField2 extra_u(ws.dom);
    DirectorField3 extra_d(ws.dom);
    if (dq != 0.0 || dqinv != 0.0) {
        VectorField2 adv = skew_bilin(w, w);
        adv *= dq;
        extra_u += adv;
        VectorField2 mdd = m_stress_div(ws.leray, s.d, s.d);
        mdd *= p.lambda * dqinv;
        extra_u += mdd;
        DirectorField3 b2 = advect_director(w, s.d);
        b2 *= dq;
        extra_d += b2;
    }

    linearized_step(dw, ms.xi, ms.eta, &extra_u, &extra_d, s, zf, qn.q, qn.q_inv, ws, cfg, p,
                    out.xi, out.eta);
    return out;
}

}  // namespace nlc
