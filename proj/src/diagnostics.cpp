#include "nlc/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "nlc/norms.hpp"
#include "nlc/stokes_modes.hpp"

namespace nlc {

double director_grad_l2sq(const DirectorField3& d) {
    const Domain& dom = d.domain();
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Array2& g = d.comp(k);
        for (int j = 0; j <= dom.ny; ++j)
            for (int i = 0; i < dom.nx; ++i) {
                const double e = g(i + 1, j) - g(i, j);
                s += e * e;
            }
        for (int j = 0; j < dom.ny; ++j)
            for (int i = 0; i <= dom.nx; ++i) {
                const double e = g(i, j + 1) - g(i, j);
                s += e * e;
            }
    }
    return s;
}

namespace {

double balance_residual_of(const LerayWorkspace& ws, const DirectorField3& d,
                           const VectorField2& v) {
    DirectorField3 lapd = neg_laplacian(d);
    lapd *= -1.0;  // Delta d
    return std::abs(inner_h(m_stress_div(ws, d, d), v) -
                    inner_interior(advect_director(v, d), lapd));
}

double polar_residual_of(const LerayWorkspace& ws, const DirectorField3& d,
                         const DirectorField3& b, const VectorField2& v) {
    DirectorField3 lapd = neg_laplacian(d);
    lapd *= -1.0;
    DirectorField3 lapb = neg_laplacian(b);
    lapb *= -1.0;
    const double lhs =
        inner_h(m_stress_div(ws, d, b), v) + inner_h(m_stress_div(ws, b, d), v);
    const double rhs = inner_interior(advect_director(v, d), lapb) +
                       inner_interior(advect_director(v, b), lapd);
    return std::abs(lhs - rhs);
}

}  // namespace

DiagRecord record(const SimState& s, const Params& p, const W0Modes& modes) {
    LerayWorkspace ws(s.u.domain());
    DiagRecord r;
    r.t = s.t;
    VectorField2 v = reconstruct_v(s, modes);
    r.e_kin = 0.5 * inner_h(v, v);
    r.e_el = 0.5 * p.lambda * director_grad_l2sq(s.d);
    r.e_gl = p.lambda * gl_F_integral(s.d, GLParams{p.eta});
    r.e_total = r.e_kin + r.e_el + r.e_gl;
    r.diss_v = p.mu * inner_h(neg_laplacian(v), v);
    {
        DirectorField3 g = neg_laplacian(s.d);
        g *= -1.0;
        DirectorField3 f = gl_f(s.d, GLParams{p.eta});
        const Domain& dom = s.d.domain();
        for (int k = 0; k < 3; ++k)
            for (int j = 1; j < dom.ny; ++j)
                for (int i = 1; i < dom.nx; ++i) g.comp(k)(i, j) -= f.comp(k)(i, j);
        // g carries boundary zeros already (neg_laplacian output)
        r.diss_d = p.lambda * p.gamma * inner_interior(g, g);
    }
    r.balance_residual = balance_residual_of(ws, s.d, v);
    r.polar_residual = polar_residual_of(ws, s.d, s.lift, v);
    r.v_l2 = norm_hm(v, 0);
    r.v_h1 = norm_hm(v, 1);
    r.d_h1 = norm_hm(s.d, 1);
    r.d_h2 = norm_hm(s.d, 2);
    r.d_h3 = norm_hm(s.d, 3);
    r.q_abs = std::abs(s.q.q);
    VectorField2 zf = z_field(s.z, modes, s.u.domain());
    r.z_h2 = norm_hm(zf, 2);
    if (!(std::isfinite(r.e_total) && std::isfinite(r.d_h3) && std::isfinite(r.z_h2)))
        throw numerical_error("diagnostics: non-finite record at t = " + std::to_string(s.t));
    return r;
}

std::string diag_csv_header() {
    return "t,e_kin,e_el,e_gl,e_total,diss_v,diss_d,balance_residual,polar_residual,"
           "v_l2,v_h1,d_h1,d_h2,d_h3,q_abs,z_h2\r\n";
}

std::string diag_csv_row(const DiagRecord& r) {
    char buf[640];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g,%.17g\r\n",
                  r.t, r.e_kin, r.e_el, r.e_gl, r.e_total, r.diss_v, r.diss_d,
                  r.balance_residual, r.polar_residual, r.v_l2, r.v_h1, r.d_h1, r.d_h2, r.d_h3,
                  r.q_abs, r.z_h2);
    return buf;
}

EnergyLawReport energy_law_check(const std::vector<DiagRecord>& recs, double dt,
                                 bool noise_free) {
    if (!noise_free)
        throw validation_error("energy_law_check: only defined for noise-free runs");
    if (recs.size() < 2) throw validation_error("energy_law_check: need at least two records");
    EnergyLawReport rep;
    rep.e0 = recs.front().e_total;
    rep.monotone = true;
    for (size_t n = 0; n + 1 < recs.size(); ++n) {
        const double de = recs[n + 1].e_total - recs[n].e_total;
        if (de > 1e-13 * std::max(1.0, rep.e0)) rep.monotone = false;
        rep.max_increase = std::max(rep.max_increase, de);
        const double defect = std::abs(de + dt * (recs[n + 1].diss_v + recs[n + 1].diss_d));
        rep.max_defect = std::max(rep.max_defect, defect);
    }
    return rep;
}

namespace {

// Manufactured smooth fields for the refinement studies.
DirectorField3 manufactured_d(const Domain& dom) {
    DirectorField3 d(dom);
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i) {
            const double x = i * dom.h, y = j * dom.h;
            d.comp(0)(i, j) = std::sin(M_PI * x) * std::sin(M_PI * y);
            d.comp(1)(i, j) = std::cos(M_PI * x) * std::sin(M_PI * y);
            d.comp(2)(i, j) = 0.5;
        }
    return d;
}

DirectorField3 manufactured_b(const Domain& dom) {
    DirectorField3 b(dom);
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i) {
            const double x = i * dom.h, y = j * dom.h;
            b.comp(0)(i, j) = std::sin(2.0 * M_PI * x) * std::sin(M_PI * y);
            b.comp(1)(i, j) = 0.3 * std::cos(M_PI * x) * std::sin(2.0 * M_PI * y);
            b.comp(2)(i, j) = 0.2;
        }
    return b;
}

VectorField2 manufactured_u(const Domain& dom) {
    Array2 psi(dom.nx + 1, dom.ny + 1);
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i) {
            const double x = i * dom.h, y = j * dom.h;
            const double sx = std::sin(M_PI * x), sy = std::sin(M_PI * y);
            psi(i, j) = sx * sx * sy * sy / M_PI;
        }
    return curl_of_stream(dom, psi);
}

}  // namespace

RefinementStudy refinement_study(const std::string& identity,
                                 const std::vector<int>& resolutions) {
    if (resolutions.size() < 3)
        throw validation_error("refinement_study: need at least 3 resolutions");
    RefinementStudy st;
    double max_scale = 0.0;
    for (int nx : resolutions) {
        Domain dom(nx);
        LerayWorkspace ws(dom);
        DirectorField3 d = manufactured_d(dom);
        VectorField2 u = manufactured_u(dom);
        double res;
        if (identity == "lemma24") {
            res = balance_residual_of(ws, d, u);
        } else if (identity == "prop25") {
            res = polar_residual_of(ws, d, manufactured_b(dom), u);
        } else {
            throw validation_error("refinement_study: unknown identity " + identity);
        }
        st.rows.push_back({dom.h, res});
        max_scale = std::max(max_scale, std::sqrt(inner_h(u, u)));
    }
    bool all_tiny = true;
    for (const auto& row : st.rows)
        if (row.residual > 1e-13 * std::max(1.0, max_scale)) all_tiny = false;
    if (all_tiny) {
        st.exact = true;
        return st;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(st.rows.size());
    for (const auto& row : st.rows) {
        const double lx = std::log(row.h), ly = std::log(row.residual);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    st.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return st;
}

std::string refinement_csv(const RefinementStudy& st) {
    std::string out = "h,residual\r\n";
    char buf[96];
    for (const auto& row : st.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\r\n", row.h, row.residual);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "slope,%.6g\r\n", st.exact ? 0.0 : st.slope);
    out += buf;
    return out;
}

}  // namespace nlc
