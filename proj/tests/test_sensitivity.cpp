#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nlc/lift.hpp"
#include "nlc/norms.hpp"
#include "nlc/skorohod.hpp"

using namespace nlc;

namespace {

struct Setup {
    Domain dom;
    Params p;
    SolverConfig cfg;

    explicit Setup(int nx, double t_end = 0.1) : dom(nx) {
        p.mu = 0.05;
        p.gamma = 0.05;
        p.lambda = 1.0;
        p.eta = 1.0;
        p.sigma0 = 0.3;
        p.sigmas = {0.5};
        cfg.dt = 1e-3;
        cfg.t_end = t_end;
    }
};

BasePath make_base(const Setup& st, const SolverWorkspace& ws, uint64_t seed,
                   const VectorField2& v0, const DirectorField3& d0) {
    NoiseConfig nc;
    nc.seed = seed;
    nc.dt = st.cfg.dt;
    nc.nsteps = st.cfg.steps();
    nc.k_channels = st.p.channels();
    nc.n_modes = ws.modes.count();
    NoisePath np = generate_noise_path(nc);
    NoiseHistory hist = build_noise_history(np, st.p, ws.modes);
    return run_base_path(make_initial_state(v0, d0, ws.modes), np, hist, ws, st.cfg, st.p);
}

BasePath replay(const Setup& st, const SolverWorkspace& ws, const NoisePath& np,
                const VectorField2& v0, const DirectorField3& d0) {
    NoiseHistory hist = build_noise_history(np, st.p, ws.modes);
    return run_base_path(make_initial_state(v0, d0, ws.modes), np, hist, ws, st.cfg, st.p);
}

TangentState propagate(const BasePath& base, const VectorField2& u0,
                       const DirectorField3& b0, const SolverWorkspace& ws,
                       const SolverConfig& cfg, const Params& p) {
    TangentState ts = make_tangent_state(u0, b0, ws.leray);
    for (int n = 0; n < base.np.nsteps; ++n) ts = step_tangent(ts, base, n, ws, cfg, p);
    return ts;
}

DirectorField3 bump(const Domain& dom) {
    DirectorField3 b(dom);
    for (int j = 1; j < dom.ny; ++j)
        for (int i = 1; i < dom.nx; ++i) {
            const double sx = std::sin(M_PI * i * dom.h), sy = std::sin(M_PI * j * dom.h);
            b.comp(0)(i, j) = sx * sy;
            b.comp(2)(i, j) = -0.4 * sx * sx * sy;
        }
    return b;
}

}  // namespace

TEST_CASE("tangent system: zero direction, linearity, fd order") {
    Setup st(16);
    SolverWorkspace ws(st.dom, st.p, st.cfg, 4);
    VectorField2 v0 = ws.modes.phi[0];
    v0 *= 0.05;
    DirectorField3 d0 = director_boundary_preset(st.dom, "tilted");
    BasePath base = make_base(st, ws, 42, v0, d0);

    // zero direction stays exactly zero
    TangentState z = propagate(base, VectorField2(st.dom), DirectorField3(st.dom), ws, st.cfg,
                               st.p);
    CHECK(norm_hm(z.u_hat, 0) == 0.0);
    CHECK(norm_hm(z.d_hat, 0) == 0.0);

    VectorField2 u0 = ws.modes.phi[1];
    DirectorField3 b0 = bump(st.dom);
    TangentState t1 = propagate(base, u0, b0, ws, st.cfg, st.p);

    // superposition over a two-term combination
    VectorField2 u0b = ws.modes.phi[2];
    DirectorField3 b0b(st.dom);
    TangentState t2 = propagate(base, u0b, b0b, ws, st.cfg, st.p);
    VectorField2 ucomb = u0;
    ucomb *= 0.7;
    {
        VectorField2 tl = u0b;
        tl *= -1.3;
        ucomb += tl;
    }
    DirectorField3 bcomb = b0;
    bcomb *= 0.7;
    TangentState tc = propagate(base, ucomb, bcomb, ws, st.cfg, st.p);
    VectorField2 expect_u = t1.u_hat;
    expect_u *= 0.7;
    {
        VectorField2 tl = t2.u_hat;
        tl *= -1.3;
        expect_u += tl;
    }
    DirectorField3 expect_d = t1.d_hat;
    expect_d *= 0.7;
    {
        DirectorField3 tl = t2.d_hat;
        tl *= -1.3;
        expect_d += tl;
    }
    const double lin =
        (norm_hm(tc.u_hat - expect_u, 0) + norm_hm(tc.d_hat - expect_d, 0)) /
        (norm_hm(tc.u_hat, 0) + norm_hm(tc.d_hat, 0) + 1e-300);
    CHECK(lin <= 1e-10);

    // finite-difference match at decreasing h
    const SimState& fin = base.states.back();
    double prev = -1.0;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        VectorField2 vh = u0;
        vh *= h;
        vh += v0;
        DirectorField3 dh = b0;
        dh *= h;
        dh += d0;
        BasePath pert = replay(st, ws, base.np, vh, dh);
        VectorField2 fdu = pert.states.back().u;
        fdu -= fin.u;
        fdu *= 1.0 / h;
        fdu -= t1.u_hat;
        DirectorField3 fdd = pert.states.back().d;
        fdd -= fin.d;
        fdd *= 1.0 / h;
        fdd -= t1.d_hat;
        const double mis = norm_hm(fdu, 1) + norm_hm(fdd, 2);
        if (prev > 0.0) CHECK(prev / mis >= 5.0);  // at least first order per decade
        prev = mis;
    }

    // misaligned base path is rejected
    TangentState bad = make_tangent_state(u0, b0, ws.leray);
    bad.t = 0.5;
    CHECK_THROWS_AS(step_tangent(bad, base, 0, ws, st.cfg, st.p), validation_error);
}

TEST_CASE("malliavin system: trivial zeros and cameron-martin shift") {
    Setup st(16);
    SolverWorkspace ws(st.dom, st.p, st.cfg, 4);
    VectorField2 v0 = ws.modes.phi[0];
    v0 *= 0.05;
    DirectorField3 d0 = director_boundary_preset(st.dom, "tilted");
    BasePath base = make_base(st, ws, 42, v0, d0);
    const SimState& fin = base.states.back();

    // all sigma = 0: no noise dependence at all
    {
        Setup s0(16);
        s0.p.sigma0 = 0.0;
        s0.p.sigmas = {0.0};
        SolverWorkspace ws0(s0.dom, s0.p, s0.cfg, 4);
        BasePath b0 = make_base(s0, ws0, 42, v0, d0);
        MalliavinDirection dir{1, 0.05, 0};
        auto dz = malliavin_z_coeffs(b0.np, b0.hist, s0.p, ws0.modes, dir);
        MalliavinState ms = make_malliavin_state(s0.dom, dir);
        for (int n = 0; n < b0.np.nsteps; ++n)
            ms = step_malliavin(ms, b0, dz, n, ws0, s0.cfg, s0.p);
        CHECK(norm_hm(ms.xi, 0) == 0.0);
        CHECK(norm_hm(ms.eta, 0) == 0.0);
    }

    // kernel time past the horizon: adapted, identically zero
    {
        MalliavinDirection dir{1, 0.5, 0};
        auto dz = malliavin_z_coeffs(base.np, base.hist, st.p, ws.modes, dir);
        MalliavinState ms = make_malliavin_state(st.dom, dir);
        for (int n = 0; n < base.np.nsteps; ++n)
            ms = step_malliavin(ms, base, dz, n, ws, st.cfg, st.p);
        CHECK(norm_hm(ms.xi, 0) == 0.0);
        CHECK(norm_hm(ms.eta, 0) == 0.0);
    }

    // Cameron-Martin: one-increment bump of each channel
    const double eps = 1e-4;
    for (int channel : {1, 0}) {
        MalliavinDirection dir{channel, 0.05, 0};
        auto dz = malliavin_z_coeffs(base.np, base.hist, st.p, ws.modes, dir);
        MalliavinState ms = make_malliavin_state(st.dom, dir);
        for (int n = 0; n < base.np.nsteps; ++n)
            ms = step_malliavin(ms, base, dz, n, ws, st.cfg, st.p);

        NoisePath np2 = base.np;
        const int nv = int(std::floor(dir.v / st.cfg.dt));
        if (channel == 0)
            np2.dbeta[0][size_t(nv)] += eps;
        else
            np2.dw[0][size_t(nv)] += eps;
        BasePath pert = replay(st, ws, np2, v0, d0);

        VectorField2 fdu = pert.states.back().u;
        fdu -= fin.u;
        fdu *= 1.0 / eps;
        fdu -= ms.xi;
        DirectorField3 fdd = pert.states.back().d;
        fdd -= fin.d;
        fdd *= 1.0 / eps;
        fdd -= ms.eta;
        const double rel = (norm_hm(fdu, 1) + norm_hm(fdd, 2)) /
                           (norm_hm(ms.xi, 1) + norm_hm(ms.eta, 2) + 1e-300);
        CHECK(rel <= 1e-2);
    }
}

TEST_CASE("skorohod samples: deterministic branch and determinism") {
    Setup st(8);
    SolverWorkspace ws(st.dom, st.p, st.cfg, 4);
    SkorohodSpec spec;
    spec.c = 1.0;
    spec.t1 = 0.05;
    spec.deterministic = true;
    SkorohodSample s1 = skorohod_sample(7, st.dom, st.p, st.cfg, spec, ws);
    CHECK(s1.corr == 0.0);  // deterministic initial datum: no correction
    SkorohodSample s2 = skorohod_sample(7, st.dom, st.p, st.cfg, spec, ws);
    CHECK(s1.strat == s2.strat);
    CHECK(s1.ito_left == s2.ito_left);
    // midpoint and left-point sums differ by the trace term in expectation,
    // so pathwise they should at least not coincide
    CHECK(s1.strat != s1.ito_left);

    spec.deterministic = false;
    SkorohodSample s3 = skorohod_sample(7, st.dom, st.p, st.cfg, spec, ws);
    CHECK(s3.corr != 0.0);
}

TEST_CASE("skorohod estimate merge is worker-count independent") {
    Setup st(8);
    SkorohodSpec spec;
    spec.c = 1.0;
    spec.t1 = 0.05;
    spec.deterministic = false;
    SkorohodEstimate e1 = skorohod_check(st.dom, st.p, st.cfg, spec, 16, 99, 1);
    SkorohodEstimate e4 = skorohod_check(st.dom, st.p, st.cfg, spec, 16, 99, 4);
    CHECK(e1.lhs_mean == e4.lhs_mean);
    CHECK(e1.rhs_mean == e4.rhs_mean);
    CHECK(e1.diff_se == e4.diff_se);
}
