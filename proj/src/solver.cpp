#include "nlc/solver.hpp"

#include <cmath>

namespace nlc {

void validate_solver_config(const SolverConfig& cfg, const Domain& dom, const Params& p) {
    if (cfg.dt <= 0.0 || cfg.t_end < cfg.dt)
        throw validation_error("solver config: need 0 < dt <= t_end");
    if (cfg.theta <= 0.0 || cfg.theta > 1.0)
        throw validation_error("solver config: theta must lie in (0, 1]");
    if (cfg.scheme == SolverConfig::Scheme::fully_explicit) {
        const double bound = cfg.cfl_safety * dom.h * dom.h / (4.0 * std::max(p.mu, p.gamma));
        if (cfg.dt > bound)
            throw validation_error("solver config: explicit scheme violates CFL, dt must be <= " +
                                   std::to_string(bound));
    }
}

SolverWorkspace::SolverWorkspace(const Domain& d, const Params& p, const SolverConfig& cfg,
                                 int w0_count)
    : dom(d),
      leray(d),
      modes(make_w0_modes(d, w0_count)),
      dt(cfg.dt),
      mu(p.mu),
      gamma(p.gamma),
      theta(cfg.theta) {
    if (cfg.scheme == SolverConfig::Scheme::semi_implicit) {
        helm_u = std::make_unique<MacHelmholtz>(d, 1.0 / (theta * dt * mu));
        helm_d = std::make_unique<NodalHelmholtz>(d, 1.0 / (theta * dt * gamma));
    }
}

SimState make_initial_state(const VectorField2& v0, const DirectorField3& d0,
                            const W0Modes& modes) {
    SimState s;
    s.t = 0.0;
    LerayWorkspace ws(v0.domain());
    s.u = ws.project(v0);
    s.d = d0;
    s.z.zeta.assign(size_t(modes.count()), 0.0);
    s.lift = harmonic_lift(d0);
    s.rd = d0;
    return s;
}

namespace {

VectorField2 skew_advect(const VectorField2& a, const VectorField2& w) {
    VectorField2 s = advect(a, w);
    s -= advect_adjoint(a, w);
    s *= 0.5;
    return s;
}

// Explicit director drift -Q B2(w,d) - gamma(A2 d + f(d)), zero on the ring.
DirectorField3 director_drift(double q, const VectorField2& w, const DirectorField3& d,
                              const Params& p) {
    DirectorField3 out = advect_director(w, d);
    out *= -q;
    DirectorField3 lap = neg_laplacian(d);
    DirectorField3 f = gl_f(d, GLParams{p.eta});
    const Domain& dom = d.domain();
    for (int k = 0; k < 3; ++k)
        for (int j = 1; j < dom.ny; ++j)
            for (int i = 1; i < dom.nx; ++i)
                out.comp(k)(i, j) -= p.gamma * (lap.comp(k)(i, j) + f.comp(k)(i, j));
    return out;
}

}  // namespace

SimState step_transformed(const SimState& s, const NoisePath& np, const NoiseHistory& hist,
                          int n, const SolverWorkspace& ws, const SolverConfig& cfg,
                          const Params& p) {
    if (n < 0 || n >= np.nsteps) throw validation_error("step_transformed: step index range");
    const double dt = cfg.dt;
    const QState& qn = hist.q[size_t(n)];

    VectorField2 zf = z_field(hist.z[size_t(n)], ws.modes, ws.dom);
    VectorField2 w = s.u + zf;

    VectorField2 adv = skew_advect(w, w);
    VectorField2 mdd = m_stress_div(ws.leray, s.d, s.d);

    SimState out;
    out.t = s.t + dt;
    out.q = hist.q[size_t(n) + 1];
    out.z = hist.z[size_t(n) + 1];
    out.lift = s.lift;
    out.rd = s.rd;

    // velocity update
    VectorField2 expl = adv;
    expl *= qn.q;
    {
        VectorField2 t2 = mdd;
        t2 *= p.lambda * qn.q_inv;
        expl += t2;
    }
    if (cfg.scheme == SolverConfig::Scheme::semi_implicit) {
        VectorField2 rhs = s.u;
        {
            VectorField2 t3 = expl;
            t3 *= dt;
            rhs -= t3;
        }
        if (cfg.theta < 1.0) {
            VectorField2 lap = neg_laplacian(s.u);
            lap *= (1.0 - cfg.theta) * dt * p.mu;
            rhs -= lap;
        }
        rhs *= 1.0 / (cfg.theta * dt * p.mu);  // Helmholtz solves (c0 I - Lap)
        out.u = ws.leray.project(ws.helm_u->solve(rhs));
    } else {
        VectorField2 rhs = s.u;
        VectorField2 lap = neg_laplacian(s.u);
        lap *= p.mu;
        expl += lap;
        expl *= dt;
        rhs -= expl;
        out.u = ws.leray.project(rhs);
    }

    // director update
    DirectorField3 b2 = advect_director(w, s.d);
    DirectorField3 f = gl_f(s.d, GLParams{p.eta});
    if (cfg.scheme == SolverConfig::Scheme::semi_implicit) {
        DirectorField3 lap1;
        if (cfg.theta < 1.0) lap1 = neg_laplacian(s.d);
        out.d = DirectorField3(ws.dom);
        const double c0 = 1.0 / (cfg.theta * dt * p.gamma);
        for (int k = 0; k < 3; ++k) {
            Array2 rhs(ws.dom.nx + 1, ws.dom.ny + 1);
            for (int j = 1; j < ws.dom.ny; ++j)
                for (int i = 1; i < ws.dom.nx; ++i) {
                    double r = s.d.comp(k)(i, j) -
                               dt * (qn.q * b2.comp(k)(i, j) + p.gamma * f.comp(k)(i, j));
                    if (cfg.theta < 1.0)
                        r -= (1.0 - cfg.theta) * dt * p.gamma * lap1.comp(k)(i, j);
                    rhs(i, j) = r * c0;
                }
            out.d.comp(k) = ws.helm_d->solve(rhs, s.d.comp(k));
        }
    } else {
        out.d = s.d;
        DirectorField3 drift = director_drift(qn.q, w, s.d, p);
        drift *= dt;
        out.d += drift;  // drift is zero on the ring, boundary data preserved
    }

    if (!out.u.finite() || !out.d.finite())
        throw numerical_error("step_transformed: NaN/Inf at t = " + std::to_string(out.t));
    return out;
}

VectorField2 reconstruct_v(const SimState& s, const W0Modes& modes) {
    VectorField2 v = s.u + z_field(s.z, modes, s.u.domain());
    v *= s.q.q;
    return v;
}

void step_stratonovich_direct(VectorField2& v, DirectorField3& d, const NoisePath& np, int n,
                              const SolverWorkspace& ws, const SolverConfig& cfg,
                              const Params& p) {
    if (n < 0 || n >= np.nsteps)
        throw validation_error("step_stratonovich_direct: step index range");
    const double dt = cfg.dt;

    auto drift_v = [&](const VectorField2& vv, const DirectorField3& dd) {
        VectorField2 raw = neg_laplacian(vv);
        raw *= -p.mu;
        raw -= skew_advect(vv, vv);
        VectorField2 out = ws.leray.project(raw);
        VectorField2 mdd = m_stress_div(ws.leray, dd, dd);
        mdd *= p.lambda;
        out -= mdd;
        return out;
    };

    double gw = 0.0;
    for (int k = 0; k < p.channels(); ++k) gw += p.sigmas[size_t(k)] * np.dw[size_t(k)][size_t(n)];
    VectorField2 aw(ws.dom);
    for (int m = 0; m < ws.modes.count(); ++m) {
        VectorField2 t = ws.modes.phi[size_t(m)];
        t *= p.sigma0 * ws.modes.rho[size_t(m)] * np.dbeta[size_t(m)][size_t(n)];
        aw += t;
    }

    VectorField2 fv0 = drift_v(v, d);
    DirectorField3 fd0 = director_drift(1.0, v, d, p);

    VectorField2 vp = v;
    {
        VectorField2 t = fv0;
        t *= dt;
        vp += t;
        t = v;
        t *= gw;
        vp += t;
        vp += aw;
        vp = ws.leray.project(vp);
    }
    DirectorField3 dp = d;
    {
        DirectorField3 t = fd0;
        t *= dt;
        dp += t;
    }

    VectorField2 fv1 = drift_v(vp, dp);
    DirectorField3 fd1 = director_drift(1.0, vp, dp, p);

    {
        VectorField2 t = fv0 + fv1;
        t *= 0.5 * dt;
        VectorField2 vn = v;
        vn += t;
        t = v + vp;
        t *= 0.5 * gw;
        vn += t;
        vn += aw;
        v = ws.leray.project(vn);
    }
    {
        DirectorField3 t = fd0 + fd1;
        t *= 0.5 * dt;
        d += t;
    }
    if (!v.finite() || !d.finite())
        throw numerical_error("step_stratonovich_direct: NaN/Inf at step " + std::to_string(n));
}

SimState apply_boundary_jump(const SimState& s, const BoundaryTrace& total) {
    SimState out = s;
    DirectorField3 nb = s.rd;
    const Domain& dom = nb.domain();
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i) {
            double tv[3];
            eval_boundary_trace(total, i * dom.h, j * dom.h, tv);
            for (int k = 0; k < 3; ++k) nb.comp(k)(i, j) += tv[k];
        }
    out.d.set_boundary_from(nb);
    out.lift = harmonic_lift(nb);
    return out;
}

}  // namespace nlc
