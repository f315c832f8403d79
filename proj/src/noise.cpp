#include "nlc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace nlc {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t trajectory_seed(uint64_t master, uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x1234567ULL));
}

double Rng::uniform() { return double(gen_() >> 11) * (1.0 / 9007199254740992.0); }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

int Rng::poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double el = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform();
    } while (p > el);
    return k - 1;
}

W0Modes make_w0_modes(const Domain& dom, int count, std::vector<double> rho) {
    StokesModes sm = compute_stokes_modes(dom, count);
    W0Modes out;
    out.phi = std::move(sm.fields);
    out.rates = std::move(sm.rates);
    if (rho.empty()) rho.assign(size_t(count), 1.0);
    if (int(rho.size()) != count)
        throw validation_error("make_w0_modes: rho size does not match mode count");
    out.rho = std::move(rho);
    return out;
}

double NoisePath::w_at(int k, int n) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += dw[k][i];
    return s;
}

NoisePath generate_noise_path(const NoiseConfig& cfg) {
    if (cfg.dt <= 0.0 || cfg.nsteps < 0 || cfg.k_channels < 0 || cfg.n_modes < 0)
        throw validation_error("generate_noise_path: bad config");
    NoisePath np;
    np.seed = cfg.seed;
    np.dt = cfg.dt;
    np.nsteps = cfg.nsteps;
    np.dw.assign(size_t(cfg.k_channels), std::vector<double>(size_t(cfg.nsteps), 0.0));
    np.dbeta.assign(size_t(cfg.n_modes), std::vector<double>(size_t(cfg.nsteps), 0.0));
    Rng rng(cfg.seed);
    const double sdt = std::sqrt(cfg.dt);
    for (int n = 0; n < cfg.nsteps; ++n) {
        for (int k = 0; k < cfg.k_channels; ++k) np.dw[k][n] = sdt * rng.gaussian();
        for (int m = 0; m < cfg.n_modes; ++m) np.dbeta[m][n] = sdt * rng.gaussian();
    }
    return np;
}

namespace {

struct PathHeader {
    char magic[4];
    uint32_t version, nsteps, kk, mm;
    uint64_t seed;
    double dt;
};
static_assert(sizeof(PathHeader) == 40);

}  // namespace

void write_noise_path(const std::string& path, const NoisePath& np) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    PathHeader h{};
    std::memcpy(h.magic, "NLCP", 4);
    h.version = 1;
    h.nsteps = uint32_t(np.nsteps);
    h.kk = uint32_t(np.channels());
    h.mm = uint32_t(np.modes());
    h.seed = np.seed;
    h.dt = np.dt;
    f.write(reinterpret_cast<const char*>(&h), sizeof(h));
    for (int n = 0; n < np.nsteps; ++n) {
        for (int k = 0; k < np.channels(); ++k)
            f.write(reinterpret_cast<const char*>(&np.dw[k][n]), 8);
        for (int m = 0; m < np.modes(); ++m)
            f.write(reinterpret_cast<const char*>(&np.dbeta[m][n]), 8);
    }
}

NoisePath read_noise_path(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    PathHeader h{};
    f.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!f || std::memcmp(h.magic, "NLCP", 4) != 0)
        throw validation_error("bad noise path file: " + path);
    NoisePath np;
    np.seed = h.seed;
    np.dt = h.dt;
    np.nsteps = int(h.nsteps);
    np.dw.assign(h.kk, std::vector<double>(h.nsteps, 0.0));
    np.dbeta.assign(h.mm, std::vector<double>(h.nsteps, 0.0));
    for (uint32_t n = 0; n < h.nsteps; ++n) {
        for (uint32_t k = 0; k < h.kk; ++k) f.read(reinterpret_cast<char*>(&np.dw[k][n]), 8);
        for (uint32_t m = 0; m < h.mm; ++m)
            f.read(reinterpret_cast<char*>(&np.dbeta[m][n]), 8);
    }
    if (!f) throw validation_error("truncated noise path file: " + path);
    return np;
}

QState advance_q(const QState& qs, const std::vector<double>& sigmas,
                 const std::vector<double>& dwk, double dt) {
    if (sigmas.size() != dwk.size()) throw dimension_error("advance_q: channel count mismatch");
    QState out = qs;
    for (size_t k = 0; k < sigmas.size(); ++k) out.w_sum += sigmas[k] * dwk[k];
    out.t += dt;
    out.q = std::exp(out.w_sum);
    out.q_inv = std::exp(-out.w_sum);
    return out;
}

ZState step_z(const ZState& zs, const QState& q_left, const QState& q_right,
              const W0Modes& modes, double sigma0, double mu,
              const std::vector<double>& dbeta_n, double dt) {
    if (int(dbeta_n.size()) != modes.count())
        throw dimension_error("step_z: increment count mismatch");
    // trapezoidal Q^{-1}: the left-frozen variant carries an O(sqrt(dt))
    // pathwise error through the W-beta cross term and caps the formulation
    // cross-check below order 1/2
    const double qi = 0.5 * (q_left.q_inv + q_right.q_inv);
    ZState out;
    out.t = zs.t + dt;
    out.zeta.resize(size_t(modes.count()), 0.0);
    for (int m = 0; m < modes.count(); ++m) {
        const double z0 = m < int(zs.zeta.size()) ? zs.zeta[m] : 0.0;
        out.zeta[m] = std::exp(-mu * modes.rates[m] * dt) * z0 +
                      sigma0 * qi * modes.rho[m] * dbeta_n[m];
    }
    return out;
}

VectorField2 z_field(const ZState& zs, const W0Modes& modes, const Domain& dom) {
    VectorField2 z(dom);
    for (int m = 0; m < int(zs.zeta.size()); ++m) {
        VectorField2 term = modes.phi[m];
        term *= zs.zeta[m];
        z += term;
    }
    return z;
}

NoiseHistory build_noise_history(const NoisePath& np, const Params& p, const W0Modes& modes) {
    if (np.channels() != p.channels())
        throw dimension_error("build_noise_history: sigma/channel count mismatch");
    if (np.modes() != modes.count())
        throw dimension_error("build_noise_history: W0 mode count mismatch");
    NoiseHistory h;
    h.q.resize(size_t(np.nsteps) + 1);
    h.z.resize(size_t(np.nsteps) + 1);
    h.z[0].zeta.assign(size_t(modes.count()), 0.0);
    for (int n = 0; n < np.nsteps; ++n) {
        std::vector<double> dwk(size_t(np.channels()));
        for (int k = 0; k < np.channels(); ++k) dwk[k] = np.dw[k][n];
        std::vector<double> dbn(size_t(np.modes()));
        for (int m = 0; m < np.modes(); ++m) dbn[m] = np.dbeta[m][n];
        h.q[n + 1] = advance_q(h.q[n], p.sigmas, dwk, np.dt);
        h.z[n + 1] = step_z(h.z[n], h.q[n], h.q[n + 1], modes, p.sigma0, p.mu, dbn, np.dt);
    }
    return h;
}

double malliavin_q(const QState& qs_at_s, const std::vector<double>& sigmas,
                   const MalliavinDirection& dir) {
    if (dir.channel == 0) return 0.0;  // Q does not see W0
    if (dir.channel < 1 || dir.channel > int(sigmas.size()))
        throw validation_error("malliavin_q: channel out of range");
    if (dir.v > qs_at_s.t) return 0.0;
    return sigmas[size_t(dir.channel - 1)] * qs_at_s.q;
}

double malliavin_qinv(const QState& qs_at_s, const std::vector<double>& sigmas,
                      const MalliavinDirection& dir) {
    if (dir.channel == 0) return 0.0;
    if (dir.channel < 1 || dir.channel > int(sigmas.size()))
        throw validation_error("malliavin_qinv: channel out of range");
    if (dir.v > qs_at_s.t) return 0.0;
    return -sigmas[size_t(dir.channel - 1)] * qs_at_s.q_inv;
}

std::vector<std::vector<double>> malliavin_z_coeffs(const NoisePath& np,
                                                    const NoiseHistory& hist, const Params& p,
                                                    const W0Modes& modes,
                                                    const MalliavinDirection& dir) {
    const int nm = modes.count();
    std::vector<std::vector<double>> out(size_t(np.nsteps) + 1,
                                         std::vector<double>(size_t(nm), 0.0));
    if (np.nsteps == 0) return out;
    // step index whose increment the kernel differentiates
    int nv = int(std::floor(dir.v / np.dt));
    nv = std::clamp(nv, 0, np.nsteps - 1);
    if (dir.channel == 0) {
        if (dir.mode < 0 || dir.mode >= nm)
            throw validation_error("malliavin_z_coeffs: mode out of range");
        const double base = p.sigma0 * 0.5 * (hist.q[nv].q_inv + hist.q[nv + 1].q_inv) *
                            modes.rho[size_t(dir.mode)];
        for (int n = nv + 1; n <= np.nsteps; ++n)
            out[n][size_t(dir.mode)] =
                base * std::exp(-p.mu * modes.rates[size_t(dir.mode)] * np.dt * (n - nv - 1));
        return out;
    }
    if (dir.channel < 1 || dir.channel > p.channels())
        throw validation_error("malliavin_z_coeffs: channel out of range");
    const double sk = p.sigmas[size_t(dir.channel - 1)];
    // Z depends on W_k only through the trapezoidal Q^{-1} factor multiplying
    // dbeta; q[j] feels the increment at step nv for every j >= nv + 1
    for (int n = nv + 1; n < np.nsteps + 1; ++n) {
        for (int m = 0; m < nm; ++m) {
            const double decay = std::exp(-p.mu * modes.rates[size_t(m)] * np.dt);
            double dqi = 0.0;  // derivative of 0.5*(q_inv[n-1] + q_inv[n])
            if (n - 1 >= nv + 1)
                dqi = -sk * 0.5 * (hist.q[n - 1].q_inv + hist.q[n].q_inv);
            else if (n - 1 == nv)
                dqi = -sk * 0.5 * hist.q[n].q_inv;
            const double drive =
                p.sigma0 * dqi * modes.rho[size_t(m)] * np.dbeta[size_t(m)][n - 1];
            out[n][size_t(m)] = decay * out[n - 1][size_t(m)] + drive;
        }
    }
    return out;
}

bool BoundaryTrace::zero() const {
    for (const auto& row : c)
        for (double v : row)
            if (v != 0.0) return false;
    return true;
}

void eval_boundary_trace(const BoundaryTrace& tr, double x, double y, double out[3]) {
    const double g[kTraceLibrarySize] = {1.0, std::cos(M_PI * x), std::cos(M_PI * y),
                                         std::cos(M_PI * x) * std::cos(M_PI * y)};
    for (int k = 0; k < 3; ++k) {
        out[k] = 0.0;
        for (int p = 0; p < kTraceLibrarySize; ++p) out[k] += tr.c[k][p] * g[p];
    }
}

JumpBoundary step_jump_boundary(const JumpBoundary& jb, double t0, double t1, Rng& rng) {
    if (t1 <= t0) throw validation_error("step_jump_boundary: empty interval");
    JumpBoundary out = jb;
    const int count = rng.poisson(jb.rate * (t1 - t0));
    std::vector<double> times(size_t(count), 0.0);
    for (auto& tm : times) tm = t0 + (t1 - t0) * rng.uniform();
    std::sort(times.begin(), times.end());
    for (double tm : times) {
        BoundaryTrace inc;
        for (auto& row : inc.c)
            for (double& v : row) v = rng.uniform(-jb.amp, jb.amp);
        out.jump_times.push_back(tm);
        out.jumps.push_back(inc);
        for (int k = 0; k < 3; ++k)
            for (int p = 0; p < kTraceLibrarySize; ++p) out.total.c[k][p] += inc.c[k][p];
    }
    out.t = t1;
    return out;
}

}  // namespace nlc
