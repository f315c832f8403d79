#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nlc/diagnostics.hpp"
#include "nlc/lift.hpp"
#include "nlc/norms.hpp"
#include "nlc/sensitivity.hpp"
#include "oracles.hpp"

using namespace nlc;

namespace {

struct Run {
    SolverConfig cfg;
    Params p;

    Run(double dt, double t_end) {
        cfg.dt = dt;
        cfg.t_end = t_end;
        p.mu = 0.05;
        p.gamma = 0.05;
        p.lambda = 1.0;
        p.eta = 1.0;
        p.sigma0 = 0.0;
        p.sigmas = {};
    }
};

BasePath run_noise_free(const Domain& dom, const Run& r, const VectorField2& v0,
                        const DirectorField3& d0, const SolverWorkspace& ws) {
    NoiseConfig nc;
    nc.seed = 1;
    nc.dt = r.cfg.dt;
    nc.nsteps = r.cfg.steps();
    nc.k_channels = 0;
    nc.n_modes = ws.modes.count();
    NoisePath np = generate_noise_path(nc);
    NoiseHistory hist = build_noise_history(np, r.p, ws.modes);
    return run_base_path(make_initial_state(v0, d0, ws.modes), np, hist, ws, r.cfg, r.p);
}

}  // namespace

TEST_CASE("cfl guard for the fully explicit scheme") {
    Domain dom(32);
    Params p;
    p.mu = 1.0;
    SolverConfig cfg;
    cfg.scheme = SolverConfig::Scheme::fully_explicit;
    cfg.dt = 1e-3;  // far above h^2/(4 mu)
    CHECK_THROWS_AS(validate_solver_config(cfg, dom, p), validation_error);
    cfg.dt = 1e-5;
    CHECK_NOTHROW(validate_solver_config(cfg, dom, p));
    cfg.scheme = SolverConfig::Scheme::semi_implicit;
    cfg.dt = 1e-3;
    CHECK_NOTHROW(validate_solver_config(cfg, dom, p));
    cfg.dt = 0.0;
    CHECK_THROWS_AS(validate_solver_config(cfg, dom, p), validation_error);
}

TEST_CASE("equilibrium is a fixed point") {
    Domain dom(16);
    Run r(1e-3, 0.2);
    SolverWorkspace ws(dom, r.p, r.cfg, 2);
    VectorField2 v0(dom);
    DirectorField3 d0 = director_boundary_preset(dom, "constant-z");
    BasePath bp = run_noise_free(dom, r, v0, d0, ws);
    double drift = 0.0;
    for (size_t n = 1; n < bp.states.size(); ++n) {
        drift = std::max(drift, testutil::max_abs_diff(bp.states[n].u, bp.states[n - 1].u));
        drift = std::max(drift, testutil::max_abs_diff(bp.states[n].d, bp.states[n - 1].d));
    }
    CHECK(drift <= 1e-12);
}

TEST_CASE("single-mode stokes decay tracks the exponential") {
    Domain dom(16);
    Run r(1e-3, 0.5);
    r.p.mu = 0.01;
    SolverWorkspace ws(dom, r.p, r.cfg, 2);
    VectorField2 v0 = ws.modes.phi[0];
    v0 *= 1e-3;
    DirectorField3 d0 = director_boundary_preset(dom, "constant-z");
    BasePath bp = run_noise_free(dom, r, v0, d0, ws);
    const double got = norm_hm(bp.states.back().u, 0);
    const double want = 1e-3 * std::exp(-r.p.mu * ws.modes.rates[0] * r.cfg.t_end);
    CHECK(std::abs(got - want) / want <= 1e-3);
}

TEST_CASE("reconstruction algebra") {
    Domain dom(8);
    Run r(1e-3, 0.01);
    r.p.sigma0 = 0.5;
    r.p.sigmas = {0.4};
    SolverWorkspace ws(dom, r.p, r.cfg, 2);
    Rng rng(6);
    VectorField2 v0 = ws.leray.project(testutil::random_velocity(dom, rng));
    DirectorField3 d0 = director_boundary_preset(dom, "tilted");
    SimState s = make_initial_state(v0, d0, ws.modes);

    // Q = 1, Z = 0 at t = 0: v equals u
    CHECK(testutil::max_abs_diff(reconstruct_v(s, ws.modes), s.u) <= 1e-15);

    // u = -Z gives v = 0
    SimState s2 = s;
    s2.z.zeta = {0.7, -0.3};
    s2.u = z_field(s2.z, ws.modes, dom);
    s2.u *= -1.0;
    CHECK(norm_hm(reconstruct_v(s2, ws.modes), 0) <= 1e-14);

    // round trip after some real evolution: u = Q^{-1} v - Z recovers u
    NoiseConfig nc;
    nc.seed = 11;
    nc.dt = r.cfg.dt;
    nc.nsteps = r.cfg.steps();
    nc.k_channels = 1;
    nc.n_modes = 2;
    NoisePath np = generate_noise_path(nc);
    NoiseHistory hist = build_noise_history(np, r.p, ws.modes);
    BasePath bp = run_base_path(s, np, hist, ws, r.cfg, r.p);
    const SimState& fin = bp.states.back();
    VectorField2 v = reconstruct_v(fin, ws.modes);
    VectorField2 u2 = v;
    u2 *= fin.q.q_inv;
    u2 -= z_field(fin.z, ws.modes, dom);
    CHECK(testutil::max_abs_diff(u2, fin.u) <= 1e-13);
}

TEST_CASE("semi-implicit scheme converges to the explicit tiny-dt oracle") {
    Domain dom(8);
    const double T = 0.02;
    VectorField2 v0 = testutil::smooth_velocity(dom, 0.2);
    DirectorField3 d0 = director_boundary_preset(dom, "tilted");

    Run ro(1e-3, T);
    oracle::ReferenceState ref = oracle::reference_trajectory(v0, d0, ro.p, 1e-5, T);

    auto solver_err = [&](double dt) {
        Run r(dt, T);
        SolverWorkspace ws(dom, r.p, r.cfg, 2);
        BasePath bp = run_noise_free(dom, r, v0, d0, ws);
        const SimState& fin = bp.states.back();
        return testutil::max_abs_diff(reconstruct_v(fin, ws.modes), ref.v) +
               testutil::max_abs_diff(fin.d, ref.d);
    };
    const double e1 = solver_err(1e-3);
    const double e2 = solver_err(5e-4);
    CHECK(e1 <= 1e-3);       // already small at dt = 1e-3
    CHECK(e1 / e2 >= 1.5);   // first order in dt toward the oracle
}

TEST_CASE("noise-free direct scheme matches the transformed one") {
    Domain dom(16);
    const double T = 0.05;
    VectorField2 v0 = testutil::smooth_velocity(dom, 0.2);
    DirectorField3 d0 = director_boundary_preset(dom, "tilted");

    auto self_err = [&](double dt) {
        Run r(dt, T);
        SolverWorkspace ws(dom, r.p, r.cfg, 2);
        BasePath bp = run_noise_free(dom, r, v0, d0, ws);
        NoiseConfig nc;
        nc.seed = 1;
        nc.dt = dt;
        nc.nsteps = r.cfg.steps();
        nc.k_channels = 0;
        nc.n_modes = 2;
        NoisePath np = generate_noise_path(nc);
        VectorField2 v = ws.leray.project(v0);
        DirectorField3 d = d0;
        for (int n = 0; n < np.nsteps; ++n)
            step_stratonovich_direct(v, d, np, n, ws, r.cfg, r.p);
        const SimState& fin = bp.states.back();
        return testutil::max_abs_diff(reconstruct_v(fin, ws.modes), v) +
               testutil::max_abs_diff(fin.d, d);
    };
    const double e1 = self_err(1e-3);
    const double e2 = self_err(5e-4);
    CHECK(e1 / e2 >= 1.5);
}

TEST_CASE("boundary jumps") {
    Domain dom(12);
    Run r(1e-3, 0.01);
    SolverWorkspace ws(dom, r.p, r.cfg, 2);
    VectorField2 v0(dom);
    DirectorField3 d0 = director_boundary_preset(dom, "tilted");
    SimState s = make_initial_state(v0, d0, ws.modes);

    // zero-size jump changes nothing
    BoundaryTrace zero;
    SimState s1 = apply_boundary_jump(s, zero);
    CHECK(testutil::max_abs_diff(s1.d, s.d) == 0.0);
    CHECK(testutil::max_abs_diff(s1.lift, s.lift) <= 1e-12);

    // constant trace shifts the harmonic lift by the same constant
    BoundaryTrace c;
    c.c[1][0] = 0.25;
    SimState s2 = apply_boundary_jump(s, c);
    double worst = 0.0;
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i)
            worst = std::max(worst, std::abs(s2.lift.comp(1)(i, j) -
                                             (s.lift.comp(1)(i, j) + 0.25)));
    CHECK(worst <= 1e-9);
    // interior director values are untouched
    double interior = 0.0;
    for (int j = 1; j < dom.ny; ++j)
        for (int i = 1; i < dom.nx; ++i)
            interior = std::max(interior,
                                std::abs(s2.d.comp(1)(i, j) - s.d.comp(1)(i, j)));
    CHECK(interior == 0.0);
    // boundary nodes carry the jump
    CHECK(s2.d.comp(1)(0, 3) == doctest::Approx(s.d.comp(1)(0, 3) + 0.25));
}

TEST_CASE("energy law on a short smooth run") {
    Domain dom(16);
    Run r(1e-3, 0.05);
    r.p.mu = 0.002;
    r.p.gamma = 0.002;
    SolverWorkspace ws(dom, r.p, r.cfg, 2);
    VectorField2 v0 = testutil::smooth_velocity(dom, 0.01);
    DirectorField3 d0 = director_boundary_preset(dom, "tilted");
    BasePath bp = run_noise_free(dom, r, v0, d0, ws);
    std::vector<DiagRecord> recs;
    for (const auto& st : bp.states) recs.push_back(record(st, r.p, ws.modes));
    EnergyLawReport rep = energy_law_check(recs, r.cfg.dt, true);
    CHECK(rep.monotone);
    CHECK(rep.max_defect <= 1e-8 * rep.e0);
    CHECK_THROWS_AS(energy_law_check(recs, r.cfg.dt, false), validation_error);
}

TEST_CASE("diagnostics record basics") {
    Domain dom(8);
    Run r(1e-3, 0.01);
    SolverWorkspace ws(dom, r.p, r.cfg, 2);
    VectorField2 v0(dom);
    DirectorField3 d0 = director_boundary_preset(dom, "constant-z");
    SimState s = make_initial_state(v0, d0, ws.modes);
    DiagRecord rec = record(s, r.p, ws.modes);
    CHECK(rec.e_kin == 0.0);
    CHECK(rec.e_el <= 1e-14);
    CHECK(rec.e_gl <= 1e-14);
    CHECK(rec.e_total == rec.e_kin + rec.e_el + rec.e_gl);
    CHECK(std::abs(rec.balance_residual) <= 1e-14);
    CHECK(rec.q_abs == 1.0);

    // v = 0, d = 0 with unit parameters: the Ginzburg-Landau energy is 1/4
    DirectorField3 dz(dom);
    SimState s0 = s;
    s0.d = dz;
    s0.lift = harmonic_lift(dz);
    DiagRecord rec0 = record(s0, r.p, ws.modes);
    CHECK(rec0.e_gl == doctest::Approx(0.25).epsilon(1e-13));

    CHECK(diag_csv_header().find("e_total") != std::string::npos);
    const std::string row = diag_csv_row(rec);
    CHECK(row.find("\r\n") == row.size() - 2);
}

TEST_CASE("refinement studies report the discrete identities") {
    for (const char* id : {"lemma24", "prop25"}) {
        RefinementStudy st = refinement_study(id, {8, 16, 32});
        REQUIRE(st.rows.size() == 3);
        CHECK((st.exact || st.slope >= 1.8));
        const std::string csv = refinement_csv(st);
        CHECK(csv.find("h,residual") == 0);
    }
}
