#include "nlc/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "nlc/lift.hpp"
#include "nlc/norms.hpp"
#include "nlc/sensitivity.hpp"
#include "nlc/skorohod.hpp"
#include "nlc/snapshot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace nlc {

int default_workers() {
    if (const char* env = std::getenv("NLC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return std::clamp(int(hc == 0 ? 1 : hc), 1, 8);
}

namespace {

std::string hash_hex(uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

void write_manifest(const RunConfig& cfg, const std::string& dir,
                    const std::vector<std::string>& artifacts) {
    json m;
    m["config"] = json::parse(run_config_json(cfg));
    m["config_hash"] = hash_hex(config_hash(cfg));
    m["code_version"] = kCodeVersion;
    m["artifacts"] = artifacts;
    write_text(dir + "/manifest.json", m.dump(2) + "\n");
}

// diag CSV with the hash/version stamp columns appended to every row
std::string stamped_header() {
    std::string h = diag_csv_header();
    h.erase(h.size() - 2);  // drop CRLF
    return h + ",config_hash,code_version\r\n";
}

std::string stamped_row(const DiagRecord& r, const std::string& stamp) {
    std::string row = diag_csv_row(r);
    row.erase(row.size() - 2);
    return row + "," + stamp + "\r\n";
}

struct TrajectoryOutput {
    std::vector<DiagRecord> records;
    SimState final_state;
    NoisePath np;
    bool failed = false;
    std::string error;
};

// One seeded trajectory; snapshots only when snap_dir is non-empty.
TrajectoryOutput run_trajectory(const RunConfig& cfg, uint64_t seed, SolverWorkspace& ws,
                                const std::string& snap_dir) {
    const Params& p = cfg.params;
    TrajectoryOutput out;

    VectorField2 v0;
    DirectorField3 d0;
    make_initial_fields(cfg, v0, d0);
    SimState s = make_initial_state(v0, d0, ws.modes);

    NoiseConfig nc;
    nc.seed = seed;
    nc.dt = cfg.solver.dt;
    nc.nsteps = cfg.solver.steps();
    nc.k_channels = p.channels();
    nc.n_modes = ws.modes.count();
    out.np = generate_noise_path(nc);
    NoiseHistory hist = build_noise_history(out.np, p, ws.modes);

    const bool jumping = cfg.solver.boundary_mode == SolverConfig::BoundaryMode::jump &&
                         cfg.noise.jump_rate > 0.0;
    JumpBoundary jb;
    jb.rate = cfg.noise.jump_rate;
    jb.amp = cfg.noise.jump_amp;
    Rng jump_rng(splitmix64(seed ^ 0x6a09e667f3bcc908ULL));

    out.records.reserve(size_t(nc.nsteps) + 1);
    out.records.push_back(record(s, p, ws.modes));

    for (int n = 0; n < nc.nsteps; ++n) {
        if (jumping && n > 0) {
            // jumps in (t_{n-1}, t_n]; a jump landing exactly on t_n takes
            // effect before the step starting at t_n (right-continuity)
            const size_t seen = jb.jump_times.size();
            jb = step_jump_boundary(jb, (n - 1) * cfg.solver.dt, n * cfg.solver.dt, jump_rng);
            if (jb.jump_times.size() != seen) s = apply_boundary_jump(s, jb.total);
        }
        try {
            s = step_transformed(s, out.np, hist, n, ws, cfg.solver, p);
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
            out.final_state = s;
            return out;
        }
        out.records.push_back(record(s, p, ws.modes));
        if (!snap_dir.empty() && cfg.output.snapshot_every > 0 &&
            (n + 1) % cfg.output.snapshot_every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "snap_%06d", n + 1);
            write_snapshot(snap_dir + "/" + name + "_v.nlcf", reconstruct_v(s, ws.modes), s.t);
            write_snapshot(snap_dir + "/" + name + "_d.nlcf", s.d, s.t);
            json side;
            side["t"] = s.t;
            side["q"] = s.q.q;
            side["w_sum"] = s.q.w_sum;
            side["config_hash"] = hash_hex(config_hash(cfg));
            side["code_version"] = kCodeVersion;
            write_text(snap_dir + "/" + name + ".json", side.dump(2) + "\n");
        }
    }
    out.final_state = s;
    return out;
}

void apply_rho_override(SolverWorkspace& ws, const RunConfig& cfg) {
    if (!cfg.noise.rho.empty()) ws.modes.rho = cfg.noise.rho;
}

}  // namespace

SimulateResult run_simulate(const RunConfig& cfg) {
    validate_run_config(cfg);
    SimulateResult res;
    fs::create_directories(cfg.output.dir);
    SolverWorkspace ws(cfg.domain, cfg.params, cfg.solver, cfg.noise.w0_modes);
    apply_rho_override(ws, cfg);
    TrajectoryOutput tr = run_trajectory(cfg, cfg.noise.seed, ws, cfg.output.dir);

    const std::string stamp = hash_hex(config_hash(cfg)) + "," + kCodeVersion;
    res.diag_path = cfg.output.dir + "/diag.csv";
    std::string csv = stamped_header();
    for (const auto& r : tr.records) csv += stamped_row(r, stamp);
    write_text(res.diag_path, csv);
    res.records = std::move(tr.records);

    std::vector<std::string> artifacts = {"diag.csv"};
    if (tr.failed) {
        // dump the last good state and the noise path for offline replay
        write_snapshot(cfg.output.dir + "/failure_u.nlcf", tr.final_state.u,
                       tr.final_state.t);
        write_snapshot(cfg.output.dir + "/failure_d.nlcf", tr.final_state.d,
                       tr.final_state.t);
        write_noise_path(cfg.output.dir + "/failure_noise.nlcp", tr.np);
        json note;
        note["error"] = tr.error;
        note["t"] = tr.final_state.t;
        note["config_hash"] = hash_hex(config_hash(cfg));
        write_text(cfg.output.dir + "/failure.json", note.dump(2) + "\n");
        artifacts.insert(artifacts.end(),
                         {"failure_u.nlcf", "failure_d.nlcf", "failure_noise.nlcp",
                          "failure.json"});
        res.exit_code = 2;
        res.message = tr.error;
    }
    write_manifest(cfg, cfg.output.dir, artifacts);
    return res;
}

EnsembleResult run_ensemble(const RunConfig& cfg, int n_traj, int workers) {
    validate_run_config(cfg);
    if (n_traj < 1) throw validation_error("run_ensemble: n_traj must be >= 1");
    workers = std::max(1, workers);
    fs::create_directories(cfg.output.dir);

    std::vector<TrajectoryOutput> outs{size_t(n_traj)};
    auto work = [&](int wi) {
        SolverWorkspace ws(cfg.domain, cfg.params, cfg.solver, cfg.noise.w0_modes);
        apply_rho_override(ws, cfg);
        for (int i = wi; i < n_traj; i += workers)
            outs[size_t(i)] =
                run_trajectory(cfg, trajectory_seed(cfg.noise.seed, uint64_t(i)), ws, "");
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int wi = 0; wi < workers; ++wi) pool.emplace_back(work, wi);
        for (auto& th : pool) th.join();
    }

    EnsembleResult res;
    const std::string stamp = hash_hex(config_hash(cfg)) + "," + kCodeVersion;
    std::vector<std::string> artifacts;
    // single writer, trajectory order: output independent of worker count
    for (int i = 0; i < n_traj; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "traj_%04d.csv", i);
        std::string csv = stamped_header();
        for (const auto& r : outs[size_t(i)].records) csv += stamped_row(r, stamp);
        write_text(cfg.output.dir + "/" + name, csv);
        artifacts.push_back(name);
        if (outs[size_t(i)].failed) res.failed.push_back(i);
    }

    std::string merged = "traj,seed,";
    {
        std::string h = diag_csv_header();
        h.erase(h.size() - 2);
        merged += h + ",failed,config_hash,code_version\r\n";
    }
    for (int i = 0; i < n_traj; ++i) {
        const auto& tr = outs[size_t(i)];
        char pre[64];
        std::snprintf(pre, sizeof(pre), "%d,%llu,", i,
                      (unsigned long long)trajectory_seed(cfg.noise.seed, uint64_t(i)));
        std::string row = diag_csv_row(tr.records.back());
        row.erase(row.size() - 2);
        merged += pre + row + (tr.failed ? ",1," : ",0,") + stamp + "\r\n";
    }
    res.merged_path = cfg.output.dir + "/ensemble.csv";
    write_text(res.merged_path, merged);
    artifacts.push_back("ensemble.csv");

    if (!res.failed.empty()) {
        json m;
        m["failed_indices"] = res.failed;
        write_text(cfg.output.dir + "/failures.json", m.dump(2) + "\n");
        artifacts.push_back("failures.json");
        res.exit_code = 2;
    }
    write_manifest(cfg, cfg.output.dir, artifacts);
    return res;
}

// ---------------------------------------------------------------------------
// verification suites

namespace {

VectorField2 random_velocity(const Domain& dom, Rng& rng) {
    VectorField2 v(dom);
    for (double& x : v.u1().data()) x = rng.uniform(-1.0, 1.0);
    for (double& x : v.u2().data()) x = rng.uniform(-1.0, 1.0);
    v.zero_normal_boundary();
    return v;
}

DirectorField3 random_interior_director(const Domain& dom, Rng& rng) {
    DirectorField3 d(dom);
    for (int k = 0; k < 3; ++k)
        for (double& x : d.comp(k).data()) x = rng.uniform(-1.0, 1.0);
    d.zero_boundary();
    return d;
}

double dir_norm(const DirectorField3& d) { return std::sqrt(inner_interior(d, d)); }

VerifyResult make_result(const std::string& name, double value, double tol, bool pass,
                         const std::string& detail) {
    return VerifyResult{name, value, tol, pass, detail};
}

// smooth interior bump used as the director perturbation direction
DirectorField3 bump_direction(const Domain& dom, double amp) {
    DirectorField3 b(dom);
    for (int j = 1; j < dom.ny; ++j)
        for (int i = 1; i < dom.nx; ++i) {
            const double sx = std::sin(M_PI * i * dom.h), sy = std::sin(M_PI * j * dom.h);
            b.comp(0)(i, j) = amp * sx * sy;
            b.comp(1)(i, j) = 0.3 * amp * std::sin(2 * M_PI * i * dom.h) * sy;
            b.comp(2)(i, j) = -0.2 * amp * sx * sy * sy;
        }
    return b;
}

struct SensitivitySetup {
    Domain dom;
    Params p;
    SolverConfig cfg;
};

SensitivitySetup sensitivity_setup(int nx, double t_end) {
    SensitivitySetup s;
    s.dom = Domain(nx);
    s.p.mu = 0.05;
    s.p.gamma = 0.05;
    s.p.lambda = 1.0;
    s.p.eta = 1.0;
    s.p.sigma0 = 0.3;
    s.p.sigmas = {0.5};
    s.cfg.dt = 1e-3;
    s.cfg.t_end = t_end;
    return s;
}

BasePath sensitivity_base(const SensitivitySetup& st, const SolverWorkspace& ws,
                          uint64_t seed, const VectorField2& v0, const DirectorField3& d0) {
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

BasePath replay_base(const SensitivitySetup& st, const SolverWorkspace& ws,
                     const NoisePath& np, const VectorField2& v0, const DirectorField3& d0) {
    NoiseHistory hist = build_noise_history(np, st.p, ws.modes);
    return run_base_path(make_initial_state(v0, d0, ws.modes), np, hist, ws, st.cfg, st.p);
}

TangentState propagate_tangent(const BasePath& base, const VectorField2& u0,
                               const DirectorField3& b0, const SolverWorkspace& ws,
                               const SolverConfig& cfg, const Params& p) {
    TangentState ts = make_tangent_state(u0, b0, ws.leray);
    for (int n = 0; n < base.np.nsteps; ++n) ts = step_tangent(ts, base, n, ws, cfg, p);
    return ts;
}

}  // namespace

std::vector<VerifyResult> verify_operators_suite() {
    std::vector<VerifyResult> out;
    for (int nx : {16, 32, 64}) {
        Domain dom(nx);
        Rng rng(uint64_t(1000 + nx));
        double worst_b1 = 0.0, worst_b2 = 0.0, worst_adj = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            VectorField2 a = random_velocity(dom, rng);
            VectorField2 v = random_velocity(dom, rng);
            const double scale1 =
                (norm_hm(advect(a, v), 0) + norm_hm(advect_adjoint(a, v), 0)) *
                    norm_hm(v, 0) +
                1e-300;
            worst_b1 = std::max(worst_b1, std::abs(b1_form(a, v, v)) / scale1);

            DirectorField3 dt = random_interior_director(dom, rng);
            const double scale2 = dir_norm(advect_director(v, dt)) * dir_norm(dt) + 1e-300;
            worst_b2 = std::max(worst_b2, std::abs(b2_form(v, dt, dt)) / scale2);

            VectorField2 b = random_velocity(dom, rng);
            VectorField2 w = random_velocity(dom, rng);
            VectorField2 cab = advect(a, b);
            VectorField2 ctw = advect_adjoint(a, w);
            const double lhs = inner_h(cab, w);
            const double rhs = inner_h(b, ctw);
            // scale by the operand sizes, not the (possibly cancelling) values
            const double sa =
                norm_hm(cab, 0) * norm_hm(w, 0) + norm_hm(b, 0) * norm_hm(ctw, 0) + 1e-300;
            worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / sa);
        }
        char nm[64];
        std::snprintf(nm, sizeof(nm), "b1_skew_zero_%d", nx);
        out.push_back(make_result(nm, worst_b1, 1e-12, worst_b1 <= 1e-12,
                                  "max |b1(u,v,v)| / scale over 100 random draws"));
        std::snprintf(nm, sizeof(nm), "b2_skew_zero_%d", nx);
        out.push_back(make_result(nm, worst_b2, 1e-12, worst_b2 <= 1e-12,
                                  "max |b2(v,d,d)| / scale over 100 random draws"));
        std::snprintf(nm, sizeof(nm), "advect_adjoint_%d", nx);
        out.push_back(make_result(nm, worst_adj, 1e-12, worst_adj <= 1e-12,
                                  "max relative adjointness defect of C(a)"));
    }
    for (const char* id : {"lemma24", "prop25"}) {
        RefinementStudy st = refinement_study(id, {16, 32, 64});
        const bool pass = st.exact || st.slope >= 1.8;
        double worst = 0.0;
        for (const auto& r : st.rows) worst = std::max(worst, r.residual);
        out.push_back(make_result(std::string("refine_") + id, st.exact ? worst : st.slope,
                                  st.exact ? 1e-13 : 1.8, pass,
                                  st.exact ? "identity exact at rounding level on all grids"
                                           : "least-squares order of residual vs h"));
    }
    {
        // projection sanity: idempotent and divergence-free
        Domain dom(32);
        Rng rng(77);
        LerayWorkspace lw(dom);
        VectorField2 w = random_velocity(dom, rng);
        VectorField2 pw = lw.project(w);
        const double div = max_divergence(pw) / (norm_hm(w, 0) / dom.h + 1e-300);
        VectorField2 ppw = lw.project(pw);
        ppw -= pw;
        const double idem = norm_hm(ppw, 0) / (norm_hm(pw, 0) + 1e-300);
        out.push_back(make_result("leray_divergence_32", div, 1e-10, div <= 1e-10,
                                  "max cell divergence of projected field (relative)"));
        out.push_back(make_result("leray_idempotent_32", idem, 1e-12, idem <= 1e-12,
                                  "relative change under a second projection"));
    }
    return out;
}

std::vector<VerifyResult> verify_energy_suite() {
    RunConfig cfg;
    cfg.domain = Domain(32);
    cfg.params.mu = 0.002;
    cfg.params.gamma = 0.002;
    cfg.params.lambda = 1.0;
    cfg.params.eta = 1.0;
    cfg.params.sigma0 = 0.0;
    cfg.params.sigmas = {};
    cfg.solver.dt = 1e-3;
    cfg.solver.t_end = 0.2;
    cfg.initial.preset = "taylor-vortex";
    cfg.initial.amplitude = 0.01;
    cfg.initial.tilt = 0.3;
    cfg.boundary_preset = "tilted";

    SolverWorkspace ws(cfg.domain, cfg.params, cfg.solver, cfg.noise.w0_modes);
    TrajectoryOutput tr = run_trajectory(cfg, 1, ws, "");
    if (tr.failed) throw numerical_error("energy suite: run failed: " + tr.error);
    EnergyLawReport rep = energy_law_check(tr.records, cfg.solver.dt, true);

    std::vector<VerifyResult> out;
    const double mono_tol = 1e-13 * std::max(1.0, rep.e0);
    out.push_back(make_result("energy_monotone", rep.max_increase, mono_tol, rep.monotone,
                              "max positive per-step energy change, noise-free run"));
    const double rel = rep.max_defect / rep.e0;
    out.push_back(make_result("energy_defect_rel", rel, 1e-8, rel <= 1e-8,
                              "max |dE + dt*dissipation| / E(0) at dt = 1e-3"));

    cfg.solver.dt = 5e-4;
    SolverWorkspace ws2(cfg.domain, cfg.params, cfg.solver, cfg.noise.w0_modes);
    TrajectoryOutput tr2 = run_trajectory(cfg, 1, ws2, "");
    if (tr2.failed) throw numerical_error("energy suite: half-dt run failed: " + tr2.error);
    EnergyLawReport rep2 = energy_law_check(tr2.records, cfg.solver.dt, true);
    const double ratio = rep2.max_defect / (rep.max_defect + 1e-300);
    out.push_back(make_result("energy_defect_halving", ratio, 0.6, ratio <= 0.6,
                              "defect ratio at dt/2 (order >= 1 means <= 0.5 + margin)"));
    return out;
}

std::vector<VerifyResult> verify_frechet_suite() {
    SensitivitySetup st = sensitivity_setup(16, 0.1);
    SolverWorkspace ws(st.dom, st.p, st.cfg, 4);

    VectorField2 v0 = ws.modes.phi[0];
    v0 *= 0.05;
    DirectorField3 d0 = director_boundary_preset(st.dom, "tilted");
    BasePath base = sensitivity_base(st, ws, 42, v0, d0);

    VectorField2 u0 = ws.modes.phi[1];
    DirectorField3 b0 = bump_direction(st.dom, 1.0);
    TangentState ts = propagate_tangent(base, u0, b0, ws, st.cfg, st.p);

    const SimState& fin = base.states.back();
    std::vector<double> mismatch;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        VectorField2 vh = u0;
        vh *= h;
        vh += v0;
        DirectorField3 dh = b0;
        dh *= h;
        dh += d0;
        BasePath pert = replay_base(st, ws, base.np, vh, dh);
        VectorField2 fdu = pert.states.back().u;
        fdu -= fin.u;
        fdu *= 1.0 / h;
        fdu -= ts.u_hat;
        DirectorField3 fdd = pert.states.back().d;
        fdd -= fin.d;
        fdd *= 1.0 / h;
        fdd -= ts.d_hat;
        mismatch.push_back(norm_hm(fdu, 1) + norm_hm(fdd, 2));
    }
    const double o1 = std::log10(mismatch[0] / mismatch[1]);
    const double o2 = std::log10(mismatch[1] / mismatch[2]);
    const double order = std::min(o1, o2);

    std::vector<VerifyResult> out;
    char det[160];
    std::snprintf(det, sizeof(det),
                  "mismatch %.3e %.3e %.3e at h = 1e-2, 1e-3, 1e-4 (orders %.2f, %.2f)",
                  mismatch[0], mismatch[1], mismatch[2], o1, o2);
    out.push_back(make_result("frechet_fd_order", order, 1.0, order >= 1.0, det));

    // linearity: tangent along 2*(u0,b0) must be exactly 2x
    VectorField2 u2 = u0;
    u2 *= 2.0;
    DirectorField3 b2 = b0;
    b2 *= 2.0;
    TangentState t2 = propagate_tangent(base, u2, b2, ws, st.cfg, st.p);
    VectorField2 du = t2.u_hat;
    {
        VectorField2 s2 = ts.u_hat;
        s2 *= 2.0;
        du -= s2;
    }
    DirectorField3 dd = t2.d_hat;
    {
        DirectorField3 s2 = ts.d_hat;
        s2 *= 2.0;
        dd -= s2;
    }
    const double lin = (norm_hm(du, 0) + norm_hm(dd, 0)) /
                       (norm_hm(ts.u_hat, 0) + norm_hm(ts.d_hat, 0) + 1e-300);
    out.push_back(make_result("frechet_linearity", lin, 1e-10, lin <= 1e-10,
                              "relative defect of tangent(2*dir) vs 2*tangent(dir)"));
    return out;
}

std::vector<VerifyResult> verify_malliavin_suite() {
    SensitivitySetup st = sensitivity_setup(16, 0.1);
    SolverWorkspace ws(st.dom, st.p, st.cfg, 4);

    VectorField2 v0 = ws.modes.phi[0];
    v0 *= 0.05;
    DirectorField3 d0 = director_boundary_preset(st.dom, "tilted");
    BasePath base = sensitivity_base(st, ws, 42, v0, d0);
    const SimState& fin = base.states.back();

    std::vector<VerifyResult> out;
    const double eps = 1e-4;
    struct Case {
        MalliavinDirection dir;
        const char* name;
    };
    const Case cases[] = {{MalliavinDirection{1, 0.05, 0}, "malliavin_cm_channel1"},
                          {MalliavinDirection{0, 0.05, 0}, "malliavin_cm_channel0"}};
    for (const Case& c : cases) {
        auto dz = malliavin_z_coeffs(base.np, base.hist, st.p, ws.modes, c.dir);
        MalliavinState ms = make_malliavin_state(st.dom, c.dir);
        for (int n = 0; n < base.np.nsteps; ++n)
            ms = step_malliavin(ms, base, dz, n, ws, st.cfg, st.p);

        NoisePath np2 = base.np;
        const int nv = std::clamp(int(std::floor(c.dir.v / st.cfg.dt)), 0,
                                  base.np.nsteps - 1);
        if (c.dir.channel >= 1)
            np2.dw[size_t(c.dir.channel - 1)][size_t(nv)] += eps;
        else
            np2.dbeta[size_t(c.dir.mode)][size_t(nv)] += eps;
        BasePath pert = replay_base(st, ws, np2, v0, d0);

        VectorField2 fdu = pert.states.back().u;
        fdu -= fin.u;
        fdu *= 1.0 / eps;
        fdu -= ms.xi;
        DirectorField3 fdd = pert.states.back().d;
        fdd -= fin.d;
        fdd *= 1.0 / eps;
        fdd -= ms.eta;
        const double denom = norm_hm(ms.xi, 1) + norm_hm(ms.eta, 2) + 1e-300;
        const double rel = (norm_hm(fdu, 1) + norm_hm(fdd, 2)) / denom;
        out.push_back(make_result(c.name, rel, 1e-2, rel <= 1e-2,
                                  "relative pathwise-shift error at eps = 1e-4"));
    }

    // adaptedness: kernel time past the horizon keeps the state exactly zero
    MalliavinDirection late{1, 0.2, 0};
    auto dz = malliavin_z_coeffs(base.np, base.hist, st.p, ws.modes, late);
    MalliavinState ms = make_malliavin_state(st.dom, late);
    for (int n = 0; n < base.np.nsteps; ++n)
        ms = step_malliavin(ms, base, dz, n, ws, st.cfg, st.p);
    const double z = norm_hm(ms.xi, 0) + norm_hm(ms.eta, 0);
    out.push_back(make_result("malliavin_adapted_zero", z, 0.0, z == 0.0,
                              "state norm for kernel time past the horizon"));
    return out;
}

std::vector<VerifyResult> verify_skorohod_suite(int n_paths, int workers) {
    SensitivitySetup st = sensitivity_setup(8, 0.1);
    std::vector<VerifyResult> out;
    for (bool deterministic : {false, true}) {
        SkorohodSpec spec;
        spec.c = 1.0;
        spec.t1 = 0.05;
        spec.deterministic = deterministic;
        spec.psi_mode = 0;
        SkorohodEstimate est =
            skorohod_check(st.dom, st.p, st.cfg, spec, n_paths, 9001, workers);
        const double tol = 3.0 * est.diff_se;
        char det[200];
        std::snprintf(det, sizeof(det),
                      "lhs %.4e +- %.1e, rhs %.4e +- %.1e, paired diff %.2e +- %.1e, "
                      "%d paths",
                      est.lhs_mean, est.lhs_se, est.rhs_mean, est.rhs_se, est.diff_mean,
                      est.diff_se, est.n_paths);
        out.push_back(make_result(deterministic ? "skorohod_deterministic" : "skorohod_random",
                                  std::abs(est.diff_mean), tol,
                                  std::abs(est.diff_mean) <= tol, det));
    }
    return out;
}

int write_verify_report(const std::string& suite, const std::vector<VerifyResult>& results,
                        const std::string& out_dir) {
    fs::create_directories(out_dir);
    bool all = true;
    json j;
    j["suite"] = suite;
    j["code_version"] = kCodeVersion;
    j["results"] = json::array();
    std::string csv = "name,value,tol,pass,detail\r\n";
    for (const auto& r : results) {
        all = all && r.pass;
        json e;
        e["name"] = r.name;
        e["value"] = r.value;
        e["tol"] = r.tol;
        e["pass"] = r.pass;
        e["detail"] = r.detail;
        j["results"].push_back(e);
        char buf[64];
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,", r.value, r.tol);
        csv += r.name + buf + (r.pass ? "1," : "0,") + csv_quote(r.detail) + "\r\n";
    }
    j["pass"] = all;
    write_text(out_dir + "/report.json", j.dump(2) + "\n");
    write_text(out_dir + "/report.csv", csv);
    return all ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sensitivity subcommand

int run_sensitivity(const RunConfig& cfg, const std::string& mode,
                    const std::string& direction_spec, bool fd_check,
                    const std::string& out_dir) {
    validate_run_config(cfg);
    fs::create_directories(out_dir);
    json spec = direction_spec.empty() ? json::object() : json::parse(direction_spec);

    const Domain& dom = cfg.domain;
    const Params& p = cfg.params;
    SolverWorkspace ws(cfg.domain, cfg.params, cfg.solver, cfg.noise.w0_modes);
    apply_rho_override(ws, cfg);

    if (mode == "skorohod") {
        SkorohodSpec sk;
        sk.c = spec.value("c", 1.0);
        sk.t1 = spec.value("t1", 0.5 * cfg.solver.t_end);
        sk.deterministic = spec.value("deterministic", false);
        sk.psi_mode = spec.value("psi_mode", 0);
        const int n_paths = spec.value("n_paths", 200);
        SkorohodEstimate est = skorohod_check(dom, p, cfg.solver, sk, n_paths,
                                              cfg.noise.seed, default_workers());
        json rep;
        rep["n_paths"] = est.n_paths;
        rep["lhs_mean"] = est.lhs_mean;
        rep["lhs_se"] = est.lhs_se;
        rep["rhs_mean"] = est.rhs_mean;
        rep["rhs_se"] = est.rhs_se;
        rep["diff_mean"] = est.diff_mean;
        rep["diff_se"] = est.diff_se;
        rep["pass_3se"] = std::abs(est.diff_mean) <= 3.0 * est.diff_se;
        rep["config_hash"] = hash_hex(config_hash(cfg));
        rep["code_version"] = kCodeVersion;
        write_text(out_dir + "/skorohod.json", rep.dump(2) + "\n");
        return rep["pass_3se"].get<bool>() ? 0 : 1;
    }

    VectorField2 v0;
    DirectorField3 d0;
    make_initial_fields(cfg, v0, d0);
    NoiseConfig nc;
    nc.seed = cfg.noise.seed;
    nc.dt = cfg.solver.dt;
    nc.nsteps = cfg.solver.steps();
    nc.k_channels = p.channels();
    nc.n_modes = ws.modes.count();
    NoisePath np = generate_noise_path(nc);
    NoiseHistory hist = build_noise_history(np, p, ws.modes);
    BasePath base =
        run_base_path(make_initial_state(v0, d0, ws.modes), np, hist, ws, cfg.solver, p);

    const std::string stamp = hash_hex(config_hash(cfg)) + "," + kCodeVersion;
    char buf[256];

    if (mode == "frechet") {
        const int u_mode = spec.value("u_mode", 0);
        const double u_amp = spec.value("u_amp", 1.0);
        const double b_amp = spec.value("b_amp", 1.0);
        if (u_mode < 0 || u_mode >= ws.modes.count())
            throw validation_error("sensitivity: u_mode out of range");
        VectorField2 u0 = ws.modes.phi[size_t(u_mode)];
        u0 *= u_amp;
        DirectorField3 b0 = bump_direction(dom, b_amp);

        TangentState ts = make_tangent_state(u0, b0, ws.leray);
        std::string csv = "t,u_hat_h1,d_hat_h2,config_hash,code_version\r\n";
        for (int n = 0;; ++n) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,", ts.t,
                          norm_hm(ts.u_hat, 1), norm_hm(ts.d_hat, 2));
            csv += buf + stamp + "\r\n";
            if (n >= np.nsteps) break;
            ts = step_tangent(ts, base, n, ws, cfg.solver, p);
        }
        write_text(out_dir + "/frechet.csv", csv);

        if (fd_check) {
            const SimState& fin = base.states.back();
            std::string fdcsv = "h,mismatch,config_hash,code_version\r\n";
            for (double h : {1e-2, 1e-3, 1e-4}) {
                VectorField2 vh = u0;
                vh *= h;
                vh += v0;
                DirectorField3 dh = b0;
                dh *= h;
                dh += d0;
                BasePath pert = run_base_path(make_initial_state(vh, dh, ws.modes), np, hist,
                                              ws, cfg.solver, p);
                VectorField2 fdu = pert.states.back().u;
                fdu -= fin.u;
                fdu *= 1.0 / h;
                fdu -= ts.u_hat;
                DirectorField3 fdd = pert.states.back().d;
                fdd -= fin.d;
                fdd *= 1.0 / h;
                fdd -= ts.d_hat;
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", h,
                              norm_hm(fdu, 1) + norm_hm(fdd, 2));
                fdcsv += buf + stamp + "\r\n";
            }
            write_text(out_dir + "/fd_check.csv", fdcsv);
        }
        return 0;
    }

    if (mode == "malliavin") {
        MalliavinDirection dir;
        dir.channel = spec.value("channel", 1);
        dir.v = spec.value("v", 0.5 * cfg.solver.t_end);
        dir.mode = spec.value("mode", 0);
        auto dz = malliavin_z_coeffs(np, hist, p, ws.modes, dir);
        MalliavinState ms = make_malliavin_state(dom, dir);
        std::string csv = "t,xi_h1,eta_h2,config_hash,code_version\r\n";
        for (int n = 0;; ++n) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,", ms.t, norm_hm(ms.xi, 1),
                          norm_hm(ms.eta, 2));
            csv += buf + stamp + "\r\n";
            if (n >= np.nsteps) break;
            ms = step_malliavin(ms, base, dz, n, ws, cfg.solver, p);
        }
        write_text(out_dir + "/malliavin.csv", csv);
        return 0;
    }

    throw validation_error("sensitivity: unknown mode '" + mode + "'");
}

}  // namespace nlc
