#include "oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "nlc/operators.hpp"

using nlc::Array2;
using nlc::DirectorField3;
using nlc::Domain;
using nlc::VectorField2;

namespace oracle {

namespace {

void size_guard(const Domain& dom) {
    if (dom.nx > 16 || dom.ny > 16)
        throw std::invalid_argument("oracle: dense path limited to grids <= 16x16");
}

double trap(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

// trapezoid MAC inner product, written out longhand
double mac_inner(const VectorField2& a, const VectorField2& b) {
    const Domain& dom = a.domain();
    double s = 0.0;
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i)
            s += trap(i, dom.nx + 1) * a.u1()(i, j) * b.u1()(i, j);
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            s += trap(j, dom.ny + 1) * a.u2()(i, j) * b.u2()(i, j);
    return s * dom.h * dom.h;
}

// centered a . grad w on the MAC grid with reflecting ghost values,
// evaluated pointwise (no stencil tables)
VectorField2 mac_advect(const VectorField2& a, const VectorField2& w) {
    const Domain& dom = a.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double c = 0.5 / dom.h;
    VectorField2 out(dom);
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double ax = a.u1()(i, j);
            const double ay = 0.25 * (a.u2()(i - 1, j) + a.u2()(i, j) + a.u2()(i - 1, j + 1) +
                                      a.u2()(i, j + 1));
            const double up = (j == ny - 1) ? -w.u1()(i, ny - 1) : w.u1()(i, j + 1);
            const double dn = (j == 0) ? -w.u1()(i, 0) : w.u1()(i, j - 1);
            out.u1()(i, j) =
                ax * (w.u1()(i + 1, j) - w.u1()(i - 1, j)) * c + ay * (up - dn) * c;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double ay = a.u2()(i, j);
            const double ax = 0.25 * (a.u1()(i, j - 1) + a.u1()(i, j) + a.u1()(i + 1, j - 1) +
                                      a.u1()(i + 1, j));
            const double rt = (i == nx - 1) ? -w.u2()(nx - 1, j) : w.u2()(i + 1, j);
            const double lf = (i == 0) ? -w.u2()(0, j) : w.u2()(i - 1, j);
            out.u2()(i, j) =
                ay * (w.u2()(i, j + 1) - w.u2()(i, j - 1)) * c + ax * (rt - lf) * c;
        }
    }
    return out;
}

double node_dx(const Array2& g, int i, int j, double h) {
    const int nx = g.nx() - 1;
    if (i == 0) return (g(1, j) - g(0, j)) / h;
    if (i == nx) return (g(nx, j) - g(nx - 1, j)) / h;
    return (g(i + 1, j) - g(i - 1, j)) / (2.0 * h);
}

double node_dy(const Array2& g, int i, int j, double h) {
    const int ny = g.ny() - 1;
    if (j == 0) return (g(i, 1) - g(i, 0)) / h;
    if (j == ny) return (g(i, ny) - g(i, ny - 1)) / h;
    return (g(i, j + 1) - g(i, j - 1)) / (2.0 * h);
}

}  // namespace

VectorField2 dense_leray(const VectorField2& w) {
    const Domain& dom = w.domain();
    size_guard(dom);
    const int nx = dom.nx, ny = dom.ny, n = nx * ny;
    const double ih = 1.0 / dom.h, ih2 = ih * ih;
    auto idx = [nx](int i, int j) { return j * nx + i; };

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int me = idx(i, j);
            if (me == 0) {
                A(0, 0) = 1.0;
                continue;
            }
            auto nb = [&](int ii, int jj) {
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) return;
                A(me, me) += ih2;
                if (idx(ii, jj) != 0) A(me, idx(ii, jj)) -= ih2;
            };
            nb(i - 1, j);
            nb(i + 1, j);
            nb(i, j - 1);
            nb(i, j + 1);
        }
    }

    Eigen::VectorXd rhs(n);
    double mean = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double div = (w.u1()(i + 1, j) - w.u1()(i, j) + w.u2()(i, j + 1) -
                                w.u2()(i, j)) *
                               ih;
            rhs[idx(i, j)] = -div;
            mean += -div;
        }
    mean /= n;
    for (int k = 0; k < n; ++k) rhs[k] -= mean;
    rhs[0] = 0.0;
    Eigen::VectorXd p = A.fullPivLu().solve(rhs);

    VectorField2 out = w;
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            out.u1()(i, j) -= (p[idx(i, j)] - p[idx(i - 1, j)]) * ih;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out.u2()(i, j) -= (p[idx(i, j)] - p[idx(i, j - 1)]) * ih;
    out.zero_normal_boundary();
    return out;
}

double quad_b1(const VectorField2& a, const VectorField2& b, const VectorField2& w) {
    return 0.5 * (mac_inner(mac_advect(a, b), w) - mac_inner(mac_advect(a, w), b));
}

double quad_b2(const VectorField2& v, const DirectorField3& d, const DirectorField3& b) {
    const Domain& dom = d.domain();
    const double c = 0.5 / dom.h;
    double s = 0.0;
    for (int j = 1; j < dom.ny; ++j) {
        for (int i = 1; i < dom.nx; ++i) {
            const double v1 = 0.5 * (v.u1()(i, j - 1) + v.u1()(i, j));
            const double v2 = 0.5 * (v.u2()(i - 1, j) + v.u2()(i, j));
            for (int k = 0; k < 3; ++k) {
                const Array2& gd = d.comp(k);
                const Array2& gb = b.comp(k);
                const double vd = v1 * (gd(i + 1, j) - gd(i - 1, j)) * c +
                                  v2 * (gd(i, j + 1) - gd(i, j - 1)) * c;
                const double vb = v1 * (gb(i + 1, j) - gb(i - 1, j)) * c +
                                  v2 * (gb(i, j + 1) - gb(i, j - 1)) * c;
                s += vd * gb(i, j) - vb * gd(i, j);
            }
        }
    }
    return 0.5 * s * dom.h * dom.h;
}

double quad_m(const DirectorField3& d, const DirectorField3& b, const VectorField2& v) {
    const Domain& dom = d.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double h = dom.h, ih = 1.0 / h;
    double s = 0.0;
    // diagonal stress entries live on cells, paired with the conservative
    // velocity derivatives on the same cells
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double t11 = 0.0, t22 = 0.0;
            for (int k = 0; k < 3; ++k) {
                const Array2& gd = d.comp(k);
                const Array2& gb = b.comp(k);
                const double dxd =
                    (gd(i + 1, j) - gd(i, j) + gd(i + 1, j + 1) - gd(i, j + 1)) / (2.0 * h);
                const double dyd =
                    (gd(i, j + 1) - gd(i, j) + gd(i + 1, j + 1) - gd(i + 1, j)) / (2.0 * h);
                const double dxb =
                    (gb(i + 1, j) - gb(i, j) + gb(i + 1, j + 1) - gb(i, j + 1)) / (2.0 * h);
                const double dyb =
                    (gb(i, j + 1) - gb(i, j) + gb(i + 1, j + 1) - gb(i + 1, j)) / (2.0 * h);
                t11 += dxd * dxb;
                t22 += dyd * dyb;
            }
            s += t11 * (v.u1()(i + 1, j) - v.u1()(i, j)) * ih +
                 t22 * (v.u2()(i, j + 1) - v.u2()(i, j)) * ih;
        }
    }
    // off-diagonal entries live on nodes
    for (int j = 1; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            double t12 = 0.0, t21 = 0.0;
            for (int k = 0; k < 3; ++k) {
                const Array2& gd = d.comp(k);
                const Array2& gb = b.comp(k);
                t12 += node_dx(gd, i, j, h) * node_dy(gb, i, j, h);
                t21 += node_dy(gd, i, j, h) * node_dx(gb, i, j, h);
            }
            s += t21 * (v.u1()(i, j) - v.u1()(i, j - 1)) * ih +
                 t12 * (v.u2()(i, j) - v.u2()(i - 1, j)) * ih;
        }
    }
    return -s * h * h;
}

OuStats ou_stats(double a, double s, double dt, int n, double zeta0) {
    OuStats out;
    out.mean = std::pow(a, n) * zeta0;
    if (std::abs(1.0 - a * a) < 1e-14) {
        out.var = s * s * dt * n;
    } else {
        out.var = s * s * dt * (1.0 - std::pow(a * a, n)) / (1.0 - a * a);
    }
    return out;
}

double lognormal_mean(const std::vector<double>& sigmas, double T) {
    double sum = 0.0;
    for (double sg : sigmas) sum += sg * sg;
    return std::exp(0.5 * sum * T);
}

ReferenceState reference_trajectory(const VectorField2& v0, const DirectorField3& d0,
                                    const nlc::Params& p, double dt, double t_end) {
    const Domain& dom = v0.domain();
    size_guard(dom);
    if (dt > 1e-5 + 1e-15)
        throw std::invalid_argument("reference_trajectory: dt must be <= 1e-5");
    nlc::LerayWorkspace lw(dom);
    ReferenceState st{lw.project(v0), d0};
    const int steps = int(t_end / dt + 0.5);
    const nlc::GLParams gl{p.eta};
    for (int n = 0; n < steps; ++n) {
        VectorField2 adv = nlc::advect(st.v, st.v);
        adv -= nlc::advect_adjoint(st.v, st.v);
        adv *= 0.5;
        VectorField2 lap = nlc::neg_laplacian(st.v);
        lap *= p.mu;
        VectorField2 m = nlc::m_stress_div(lw, st.d, st.d);
        m *= p.lambda;
        VectorField2 rhs = st.v;
        adv += lap;
        adv += m;
        adv *= dt;
        rhs -= adv;
        st.v = lw.project(rhs);

        DirectorField3 dd = nlc::advect_director(st.v, st.d);
        DirectorField3 a2 = nlc::neg_laplacian(st.d);
        DirectorField3 f = nlc::gl_f(st.d, gl);
        f.zero_boundary();
        a2 += f;
        a2 *= p.gamma;
        dd += a2;
        dd *= dt;
        dd.zero_boundary();
        st.d -= dd;
    }
    return st;
}

namespace {

// regularized incomplete gamma Q(a, x), series + continued fraction
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int it = 0; it < 500; ++it) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e300, dd = 1.0 / b, hh = dd;
    for (int it = 1; it <= 500; ++it) {
        const double an = -it * (it - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < 1e-300) dd = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        dd = 1.0 / dd;
        const double del = dd * c;
        hh *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * hh;
}

}  // namespace

double chi_square_pvalue(double chi2, int dof) {
    return gamma_q(0.5 * dof, 0.5 * chi2);
}

}  // namespace oracle
