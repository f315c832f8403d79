#include "nlc/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nlc/lift.hpp"
#include "nlc/snapshot.hpp"
#include "nlc/stokes_modes.hpp"

namespace nlc {

using json = nlohmann::json;

RunConfig default_run_config() { return RunConfig{}; }

namespace {

std::string scheme_name(SolverConfig::Scheme s) {
    return s == SolverConfig::Scheme::semi_implicit ? "semi-implicit" : "fully-explicit";
}

SolverConfig::Scheme scheme_from(const std::string& s) {
    if (s == "semi-implicit") return SolverConfig::Scheme::semi_implicit;
    if (s == "fully-explicit") return SolverConfig::Scheme::fully_explicit;
    throw validation_error("config: unknown scheme '" + s + "'");
}

std::string bmode_name(SolverConfig::BoundaryMode m) {
    return m == SolverConfig::BoundaryMode::fixed ? "fixed" : "jump";
}

SolverConfig::BoundaryMode bmode_from(const std::string& s) {
    if (s == "fixed") return SolverConfig::BoundaryMode::fixed;
    if (s == "jump") return SolverConfig::BoundaryMode::jump;
    throw validation_error("config: unknown boundary_mode '" + s + "'");
}

}  // namespace

std::string run_config_json(const RunConfig& c) {
    json j;
    j["domain"] = {{"nx", c.domain.nx}, {"lx", c.domain.lx}};
    j["params"] = {{"mu", c.params.mu},         {"lambda", c.params.lambda},
                   {"gamma", c.params.gamma},   {"eta", c.params.eta},
                   {"sigma0", c.params.sigma0}, {"sigmas", c.params.sigmas}};
    j["solver"] = {{"dt", c.solver.dt},
                   {"t_end", c.solver.t_end},
                   {"scheme", scheme_name(c.solver.scheme)},
                   {"boundary_mode", bmode_name(c.solver.boundary_mode)},
                   {"theta", c.solver.theta}};
    j["noise"] = {{"seed", c.noise.seed},
                  {"w0_modes", c.noise.w0_modes},
                  {"rho", c.noise.rho},
                  {"jump_rate", c.noise.jump_rate},
                  {"jump_amp", c.noise.jump_amp}};
    j["initial"] = {{"preset", c.initial.preset},
                    {"amplitude", c.initial.amplitude},
                    {"tilt", c.initial.tilt},
                    {"snapshot_v", c.initial.snapshot_v},
                    {"snapshot_d", c.initial.snapshot_d}};
    j["boundary"] = {{"preset", c.boundary_preset}};
    j["output"] = {{"dir", c.output.dir}, {"snapshot_every", c.output.snapshot_every}};
    return j.dump(2);
}

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig c;
    try {
        if (j.contains("domain"))
            c.domain = Domain(j["domain"].value("nx", 32), j["domain"].value("lx", 1.0));
        if (j.contains("params")) {
            const auto& p = j["params"];
            c.params.mu = p.value("mu", c.params.mu);
            c.params.lambda = p.value("lambda", c.params.lambda);
            c.params.gamma = p.value("gamma", c.params.gamma);
            c.params.eta = p.value("eta", c.params.eta);
            c.params.sigma0 = p.value("sigma0", c.params.sigma0);
            c.params.sigmas = p.value("sigmas", c.params.sigmas);
        }
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            c.solver.dt = s.value("dt", c.solver.dt);
            c.solver.t_end = s.value("t_end", c.solver.t_end);
            if (s.contains("scheme")) c.solver.scheme = scheme_from(s["scheme"]);
            if (s.contains("boundary_mode"))
                c.solver.boundary_mode = bmode_from(s["boundary_mode"]);
            c.solver.theta = s.value("theta", c.solver.theta);
        }
        if (j.contains("noise")) {
            const auto& n = j["noise"];
            c.noise.seed = n.value("seed", c.noise.seed);
            c.noise.w0_modes = n.value("w0_modes", c.noise.w0_modes);
            c.noise.rho = n.value("rho", c.noise.rho);
            c.noise.jump_rate = n.value("jump_rate", c.noise.jump_rate);
            c.noise.jump_amp = n.value("jump_amp", c.noise.jump_amp);
        }
        if (j.contains("initial")) {
            const auto& i = j["initial"];
            c.initial.preset = i.value("preset", c.initial.preset);
            c.initial.amplitude = i.value("amplitude", c.initial.amplitude);
            c.initial.tilt = i.value("tilt", c.initial.tilt);
            c.initial.snapshot_v = i.value("snapshot_v", c.initial.snapshot_v);
            c.initial.snapshot_d = i.value("snapshot_d", c.initial.snapshot_d);
        }
        if (j.contains("boundary"))
            c.boundary_preset = j["boundary"].value("preset", c.boundary_preset);
        if (j.contains("output")) {
            c.output.dir = j["output"].value("dir", c.output.dir);
            c.output.snapshot_every =
                j["output"].value("snapshot_every", c.output.snapshot_every);
        }
    } catch (const json::exception& e) {
        throw validation_error(std::string("config: bad field type: ") + e.what());
    }
    validate_run_config(c);
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str());
}

uint64_t config_hash(const RunConfig& cfg) {
    // FNV-1a over the canonical serialization, minus the output block: where
    // artifacts land must not change the identity of the run itself
    json j = json::parse(run_config_json(cfg));
    j.erase("output");
    const std::string s = j.dump(2);
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

void validate_run_config(const RunConfig& cfg) {
    validate_params(cfg.params);
    if (cfg.domain.nx < 4) throw validation_error("config: domain.nx must be >= 4");
    validate_solver_config(cfg.solver, cfg.domain, cfg.params);
    if (cfg.noise.w0_modes < 1) throw validation_error("config: noise.w0_modes must be >= 1");
    if (!cfg.noise.rho.empty() && int(cfg.noise.rho.size()) != cfg.noise.w0_modes)
        throw validation_error("config: noise.rho size must match noise.w0_modes");
    if (cfg.noise.jump_rate < 0.0) throw validation_error("config: noise.jump_rate < 0");
    if (cfg.initial.preset != "equilibrium" && cfg.initial.preset != "taylor-vortex" &&
        cfg.initial.preset != "random-smooth")
        throw validation_error("config: unknown initial.preset '" + cfg.initial.preset + "'");
    if (cfg.boundary_preset != "constant-z" && cfg.boundary_preset != "tilted")
        throw validation_error("config: unknown boundary.preset '" + cfg.boundary_preset + "'");
}

void make_initial_fields(const RunConfig& cfg, VectorField2& v0, DirectorField3& d0) {
    const Domain& dom = cfg.domain;
    if (!cfg.initial.snapshot_v.empty() || !cfg.initial.snapshot_d.empty()) {
        if (cfg.initial.snapshot_v.empty() || cfg.initial.snapshot_d.empty())
            throw validation_error("config: snapshot_v and snapshot_d must be given together");
        v0 = read_snapshot_velocity(cfg.initial.snapshot_v);
        d0 = read_snapshot_director(cfg.initial.snapshot_d);
        require_same_domain(dom, v0.domain(), "initial snapshot");
        return;
    }
    if (cfg.initial.preset == "equilibrium") {
        v0 = VectorField2(dom);
        d0 = director_boundary_preset(dom, cfg.boundary_preset);
        return;
    }
    if (cfg.initial.preset == "taylor-vortex") {
        Array2 psi(dom.nx + 1, dom.ny + 1);
        for (int j = 0; j <= dom.ny; ++j)
            for (int i = 0; i <= dom.nx; ++i) {
                const double sx = std::sin(M_PI * i * dom.h), sy = std::sin(M_PI * j * dom.h);
                psi(i, j) = cfg.initial.amplitude * sx * sx * sy * sy;
            }
        v0 = curl_of_stream(dom, psi);
        d0 = DirectorField3(dom);
        for (int j = 0; j <= dom.ny; ++j)
            for (int i = 0; i <= dom.nx; ++i) {
                const double a = cfg.initial.tilt * std::sin(M_PI * i * dom.h) *
                                 std::sin(M_PI * j * dom.h);
                d0.comp(0)(i, j) = std::sin(a);
                d0.comp(1)(i, j) = 0.0;
                d0.comp(2)(i, j) = std::cos(a);
            }
        return;
    }
    // random-smooth: seeded low-pass modal combination
    Rng rng(splitmix64(cfg.noise.seed ^ 0xabcdef12345ULL));
    Array2 psi(dom.nx + 1, dom.ny + 1);
    double cc[3][3], dc[3][3][3];
    for (auto& row : cc)
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
    for (auto& comp : dc)
        for (auto& row : comp)
            for (double& v : row) v = rng.uniform(-1.0, 1.0);
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i) {
            const double x = i * dom.h, y = j * dom.h;
            double s = 0.0;
            for (int p = 1; p <= 3; ++p)
                for (int q = 1; q <= 3; ++q)
                    s += cc[p - 1][q - 1] / double(p * p + q * q) * std::sin(p * M_PI * x) *
                         std::sin(q * M_PI * y);
            psi(i, j) = cfg.initial.amplitude * s;
        }
    v0 = curl_of_stream(dom, psi);
    d0 = director_boundary_preset(dom, cfg.boundary_preset);
    for (int j = 1; j < dom.ny; ++j)
        for (int i = 1; i < dom.nx; ++i) {
            const double x = i * dom.h, y = j * dom.h;
            for (int k = 0; k < 3; ++k) {
                double s = 0.0;
                for (int p = 1; p <= 3; ++p)
                    for (int q = 1; q <= 3; ++q)
                        s += dc[k][p - 1][q - 1] / double(p * p + q * q) *
                             std::sin(p * M_PI * x) * std::sin(q * M_PI * y);
                d0.comp(k)(i, j) += cfg.initial.tilt * s;
            }
        }
}

}  // namespace nlc
