#include "nlc/operators.hpp"

#include <cmath>
#include <vector>

namespace nlc {

using Trip = Eigen::Triplet<double>;

// ---------------------------------------------------------------------------
// Laplacians and Helmholtz solves

VectorField2 neg_laplacian(const VectorField2& v) {
    const Domain& dom = v.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double ih2 = 1.0 / (dom.h * dom.h);
    VectorField2 out(dom);
    const Array2& u1 = v.u1();
    const Array2& u2 = v.u2();
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            double lap = (u1(i + 1, j) + u1(i - 1, j) - 2.0 * u1(i, j)) * ih2;
            if (j == 0)
                lap += (u1(i, 1) - 3.0 * u1(i, 0)) * ih2;  // ghost = -u1(i,0)
            else if (j == ny - 1)
                lap += (u1(i, ny - 2) - 3.0 * u1(i, ny - 1)) * ih2;
            else
                lap += (u1(i, j + 1) + u1(i, j - 1) - 2.0 * u1(i, j)) * ih2;
            out.u1()(i, j) = -lap;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double lap = (u2(i, j + 1) + u2(i, j - 1) - 2.0 * u2(i, j)) * ih2;
            if (i == 0)
                lap += (u2(1, j) - 3.0 * u2(0, j)) * ih2;
            else if (i == nx - 1)
                lap += (u2(nx - 2, j) - 3.0 * u2(nx - 1, j)) * ih2;
            else
                lap += (u2(i + 1, j) + u2(i - 1, j) - 2.0 * u2(i, j)) * ih2;
            out.u2()(i, j) = -lap;
        }
    }
    return out;
}

DirectorField3 neg_laplacian(const DirectorField3& d) {
    const Domain& dom = d.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double ih2 = 1.0 / (dom.h * dom.h);
    DirectorField3 out(dom);
    for (int k = 0; k < 3; ++k) {
        const Array2& g = d.comp(k);
        Array2& o = out.comp(k);
        for (int j = 1; j < ny; ++j)
            for (int i = 1; i < nx; ++i)
                o(i, j) = -(g(i + 1, j) + g(i - 1, j) + g(i, j + 1) + g(i, j - 1) -
                            4.0 * g(i, j)) *
                          ih2;
    }
    return out;
}

NodalHelmholtz::NodalHelmholtz(const Domain& dom, double c0) : dom_(dom), c0_(c0) {
    const int nx = dom.nx, ny = dom.ny;
    const int mi = nx - 1, mj = ny - 1;  // interior node counts
    const double ih2 = 1.0 / (dom.h * dom.h);
    auto idx = [mi](int i, int j) { return (j - 1) * mi + (i - 1); };
    std::vector<Trip> trips;
    trips.reserve(size_t(5) * mi * mj);
    for (int j = 1; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const int me = idx(i, j);
            trips.emplace_back(me, me, c0 + 4.0 * ih2);
            if (i > 1) trips.emplace_back(me, idx(i - 1, j), -ih2);
            if (i < nx - 1) trips.emplace_back(me, idx(i + 1, j), -ih2);
            if (j > 1) trips.emplace_back(me, idx(i, j - 1), -ih2);
            if (j < ny - 1) trips.emplace_back(me, idx(i, j + 1), -ih2);
        }
    }
    Eigen::SparseMatrix<double> mat(mi * mj, mi * mj);
    mat.setFromTriplets(trips.begin(), trips.end());
    fac_.compute(mat);
    if (fac_.info() != Eigen::Success)
        throw numerical_error("nodal Helmholtz factorization failed");
}

Array2 NodalHelmholtz::solve(const Array2& rhs, const Array2& bc) const {
    const int nx = dom_.nx, ny = dom_.ny;
    const int mi = nx - 1;
    const double ih2 = 1.0 / (dom_.h * dom_.h);
    Eigen::VectorXd b(mi * (ny - 1));
    for (int j = 1; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            double r = rhs(i, j);
            if (i == 1) r += bc(0, j) * ih2;
            if (i == nx - 1) r += bc(nx, j) * ih2;
            if (j == 1) r += bc(i, 0) * ih2;
            if (j == ny - 1) r += bc(i, ny) * ih2;
            b[(j - 1) * mi + (i - 1)] = r;
        }
    }
    Eigen::VectorXd x = fac_.solve(b);
    if (fac_.info() != Eigen::Success) throw numerical_error("nodal Helmholtz solve failed");
    Array2 out(nx + 1, ny + 1);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const bool bdry = i == 0 || i == nx || j == 0 || j == ny;
            out(i, j) = bdry ? bc(i, j) : x[(j - 1) * mi + (i - 1)];
        }
    return out;
}

MacHelmholtz::MacHelmholtz(const Domain& dom, double c0) : dom_(dom), c0_(c0) {
    const int nx = dom.nx, ny = dom.ny;
    const double ih2 = 1.0 / (dom.h * dom.h);
    {
        // u1 unknowns: i = 1..nx-1, j = 0..ny-1
        const int mi = nx - 1;
        auto idx = [mi](int i, int j) { return j * mi + (i - 1); };
        std::vector<Trip> trips;
        for (int j = 0; j < ny; ++j) {
            for (int i = 1; i < nx; ++i) {
                const int me = idx(i, j);
                const bool wall = j == 0 || j == ny - 1;
                trips.emplace_back(me, me, c0 + (wall ? 5.0 : 4.0) * ih2);
                if (i > 1) trips.emplace_back(me, idx(i - 1, j), -ih2);
                if (i < nx - 1) trips.emplace_back(me, idx(i + 1, j), -ih2);
                if (j > 0) trips.emplace_back(me, idx(i, j - 1), -ih2);
                if (j < ny - 1) trips.emplace_back(me, idx(i, j + 1), -ih2);
            }
        }
        Eigen::SparseMatrix<double> mat(mi * ny, mi * ny);
        mat.setFromTriplets(trips.begin(), trips.end());
        fac1_.compute(mat);
    }
    {
        // u2 unknowns: i = 0..nx-1, j = 1..ny-1
        auto idx = [nx](int i, int j) { return (j - 1) * nx + i; };
        std::vector<Trip> trips;
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int me = idx(i, j);
                const bool wall = i == 0 || i == nx - 1;
                trips.emplace_back(me, me, c0 + (wall ? 5.0 : 4.0) * ih2);
                if (i > 0) trips.emplace_back(me, idx(i - 1, j), -ih2);
                if (i < nx - 1) trips.emplace_back(me, idx(i + 1, j), -ih2);
                if (j > 1) trips.emplace_back(me, idx(i, j - 1), -ih2);
                if (j < ny - 1) trips.emplace_back(me, idx(i, j + 1), -ih2);
            }
        }
        Eigen::SparseMatrix<double> mat(nx * (ny - 1), nx * (ny - 1));
        mat.setFromTriplets(trips.begin(), trips.end());
        fac2_.compute(mat);
    }
    if (fac1_.info() != Eigen::Success || fac2_.info() != Eigen::Success)
        throw numerical_error("MAC Helmholtz factorization failed");
}

VectorField2 MacHelmholtz::solve(const VectorField2& rhs) const {
    require_same_domain(dom_, rhs.domain(), "mac_helmholtz");
    const int nx = dom_.nx, ny = dom_.ny;
    VectorField2 out(dom_);
    {
        const int mi = nx - 1;
        Eigen::VectorXd b(mi * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) b[j * mi + (i - 1)] = rhs.u1()(i, j);
        Eigen::VectorXd x = fac1_.solve(b);
        if (fac1_.info() != Eigen::Success) throw numerical_error("MAC Helmholtz u1 solve failed");
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) out.u1()(i, j) = x[j * mi + (i - 1)];
    }
    {
        Eigen::VectorXd b(nx * (ny - 1));
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) b[(j - 1) * nx + i] = rhs.u2()(i, j);
        Eigen::VectorXd x = fac2_.solve(b);
        if (fac2_.info() != Eigen::Success) throw numerical_error("MAC Helmholtz u2 solve failed");
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) out.u2()(i, j) = x[(j - 1) * nx + i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Velocity advection. A single stencil enumeration drives both C(a) and its
// exact transpose, so the skew-split form is antisymmetric to rounding.

namespace {

template <class Emit>
void enumerate_advection(const VectorField2& a, Emit&& emit) {
    const Domain& dom = a.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double c = 0.5 / dom.h;
    const Array2& a1 = a.u1();
    const Array2& a2 = a.u2();
    // u1 rows
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double ax = a1(i, j) * c;
            const double ay =
                0.25 * (a2(i - 1, j) + a2(i, j) + a2(i - 1, j + 1) + a2(i, j + 1)) * c;
            emit(0, i, j, 0, i + 1, j, ax);
            emit(0, i, j, 0, i - 1, j, -ax);
            if (j == 0) {  // ghost below: w = -w(i,0)
                emit(0, i, 0, 0, i, 1, ay);
                emit(0, i, 0, 0, i, 0, ay);
            } else if (j == ny - 1) {
                emit(0, i, j, 0, i, j, -ay);
                emit(0, i, j, 0, i, j - 1, -ay);
            } else {
                emit(0, i, j, 0, i, j + 1, ay);
                emit(0, i, j, 0, i, j - 1, -ay);
            }
        }
    }
    // u2 rows
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double ay = a2(i, j) * c;
            const double ax =
                0.25 * (a1(i, j - 1) + a1(i, j) + a1(i + 1, j - 1) + a1(i + 1, j)) * c;
            emit(1, i, j, 1, i, j + 1, ay);
            emit(1, i, j, 1, i, j - 1, -ay);
            if (i == 0) {
                emit(1, 0, j, 1, 1, j, ax);
                emit(1, 0, j, 1, 0, j, ax);
            } else if (i == nx - 1) {
                emit(1, i, j, 1, i, j, -ax);
                emit(1, i, j, 1, i - 1, j, -ax);
            } else {
                emit(1, i, j, 1, i + 1, j, ax);
                emit(1, i, j, 1, i - 1, j, -ax);
            }
        }
    }
}

Array2& comp_of(VectorField2& v, int c) { return c == 0 ? v.u1() : v.u2(); }
const Array2& comp_of(const VectorField2& v, int c) { return c == 0 ? v.u1() : v.u2(); }

}  // namespace

VectorField2 advect(const VectorField2& a, const VectorField2& w) {
    require_same_domain(a.domain(), w.domain(), "advect");
    VectorField2 out(a.domain());
    enumerate_advection(a, [&](int oc, int oi, int oj, int ic, int ii, int ij, double cf) {
        comp_of(out, oc)(oi, oj) += cf * comp_of(w, ic)(ii, ij);
    });
    return out;
}

VectorField2 advect_adjoint(const VectorField2& a, const VectorField2& b) {
    require_same_domain(a.domain(), b.domain(), "advect_adjoint");
    VectorField2 out(a.domain());
    enumerate_advection(a, [&](int oc, int oi, int oj, int ic, int ii, int ij, double cf) {
        comp_of(out, ic)(ii, ij) += cf * comp_of(b, oc)(oi, oj);
    });
    out.zero_normal_boundary();
    return out;
}

double b1_form(const VectorField2& a, const VectorField2& b, const VectorField2& w) {
    return 0.5 * (inner_h(advect(a, b), w) - inner_h(advect(a, w), b));
}

VectorField2 b1_op(const LerayWorkspace& ws, const VectorField2& a, const VectorField2& b) {
    VectorField2 s = advect(a, b);
    s -= advect_adjoint(a, b);
    s *= 0.5;
    return ws.project(s);
}

// ---------------------------------------------------------------------------
// Director transport

DirectorField3 advect_director(const VectorField2& v, const DirectorField3& d) {
    require_same_domain(v.domain(), d.domain(), "advect_director");
    const Domain& dom = d.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double c = 0.5 / dom.h;
    DirectorField3 out(dom);
    for (int j = 1; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double v1 = 0.5 * (v.u1()(i, j - 1) + v.u1()(i, j));
            const double v2 = 0.5 * (v.u2()(i - 1, j) + v.u2()(i, j));
            for (int k = 0; k < 3; ++k) {
                const Array2& g = d.comp(k);
                out.comp(k)(i, j) = v1 * (g(i + 1, j) - g(i - 1, j)) * c +
                                    v2 * (g(i, j + 1) - g(i, j - 1)) * c;
            }
        }
    }
    return out;
}

double inner_interior(const DirectorField3& a, const DirectorField3& b) {
    require_same_domain(a.domain(), b.domain(), "inner_interior");
    const Domain& dom = a.domain();
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
        for (int j = 1; j < dom.ny; ++j)
            for (int i = 1; i < dom.nx; ++i) s += a.comp(k)(i, j) * b.comp(k)(i, j);
    return s * dom.h * dom.h;
}

double b2_form(const VectorField2& v, const DirectorField3& d, const DirectorField3& b) {
    return 0.5 *
           (inner_interior(advect_director(v, d), b) - inner_interior(advect_director(v, b), d));
}

VectorField2 apply_a1(const LerayWorkspace& ws, const VectorField2& v) {
    return ws.project(neg_laplacian(v));
}

DirectorField3 apply_a2(const DirectorField3& d) { return neg_laplacian(d); }

// ---------------------------------------------------------------------------
// Ericksen stress coupling

namespace {

// One-sided at the boundary ring, centered inside.
double nodal_dx(const Array2& g, int i, int j, double h) {
    const int nx = g.nx() - 1;
    if (i == 0) return (g(1, j) - g(0, j)) / h;
    if (i == nx) return (g(nx, j) - g(nx - 1, j)) / h;
    return (g(i + 1, j) - g(i - 1, j)) / (2.0 * h);
}

double nodal_dy(const Array2& g, int i, int j, double h) {
    const int ny = g.ny() - 1;
    if (j == 0) return (g(i, 1) - g(i, 0)) / h;
    if (j == ny) return (g(i, ny) - g(i, ny - 1)) / h;
    return (g(i, j + 1) - g(i, j - 1)) / (2.0 * h);
}

struct StressTables {
    Array2 t11, t22;  // cell-centered
    Array2 t12, t21;  // nodal
};

StressTables stress_tables(const DirectorField3& d, const DirectorField3& b) {
    const Domain& dom = d.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double h = dom.h;
    StressTables t{Array2(nx, ny), Array2(nx, ny), Array2(nx + 1, ny + 1), Array2(nx + 1, ny + 1)};
    for (int k = 0; k < 3; ++k) {
        const Array2& gd = d.comp(k);
        const Array2& gb = b.comp(k);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double dxd =
                    (gd(i + 1, j) - gd(i, j) + gd(i + 1, j + 1) - gd(i, j + 1)) / (2.0 * h);
                const double dyd =
                    (gd(i, j + 1) - gd(i, j) + gd(i + 1, j + 1) - gd(i + 1, j)) / (2.0 * h);
                const double dxb =
                    (gb(i + 1, j) - gb(i, j) + gb(i + 1, j + 1) - gb(i, j + 1)) / (2.0 * h);
                const double dyb =
                    (gb(i, j + 1) - gb(i, j) + gb(i + 1, j + 1) - gb(i + 1, j)) / (2.0 * h);
                t.t11(i, j) += dxd * dxb;
                t.t22(i, j) += dyd * dyb;
            }
        }
        for (int j = 0; j <= ny; ++j) {
            for (int i = 0; i <= nx; ++i) {
                t.t12(i, j) += nodal_dx(gd, i, j, h) * nodal_dy(gb, i, j, h);
                t.t21(i, j) += nodal_dy(gd, i, j, h) * nodal_dx(gb, i, j, h);
            }
        }
    }
    return t;
}

}  // namespace

VectorField2 m_stress_div(const LerayWorkspace& ws, const DirectorField3& d,
                          const DirectorField3& b) {
    require_same_domain(d.domain(), b.domain(), "m_stress_div");
    const Domain& dom = d.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double ih = 1.0 / dom.h;
    StressTables t = stress_tables(d, b);
    VectorField2 w(dom);
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            w.u1()(i, j) =
                (t.t11(i, j) - t.t11(i - 1, j)) * ih + (t.t21(i, j + 1) - t.t21(i, j)) * ih;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            w.u2()(i, j) =
                (t.t12(i + 1, j) - t.t12(i, j)) * ih + (t.t22(i, j) - t.t22(i, j - 1)) * ih;
    return ws.project(w);
}

double m_form(const DirectorField3& d, const DirectorField3& b, const VectorField2& v) {
    require_same_domain(d.domain(), v.domain(), "m_form");
    const Domain& dom = d.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double ih = 1.0 / dom.h;
    StressTables t = stress_tables(d, b);
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double dxv1 = (v.u1()(i + 1, j) - v.u1()(i, j)) * ih;
            const double dyv2 = (v.u2()(i, j + 1) - v.u2()(i, j)) * ih;
            s += t.t11(i, j) * dxv1 + t.t22(i, j) * dyv2;
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double dyv1 = (v.u1()(i, j) - v.u1()(i, j - 1)) * ih;
            const double dxv2 = (v.u2()(i, j) - v.u2()(i - 1, j)) * ih;
            s += t.t21(i, j) * dyv1 + t.t12(i, j) * dxv2;
        }
    return -s * dom.h * dom.h;
}

// ---------------------------------------------------------------------------
// Ginzburg-Landau terms

DirectorField3 gl_f(const DirectorField3& d, const GLParams& p) {
    const double ie2 = 1.0 / (p.eta * p.eta);
    DirectorField3 out(d.domain());
    const size_t n = d.comp(0).size();
    for (size_t m = 0; m < n; ++m) {
        const double d0 = d.comp(0).data()[m], d1 = d.comp(1).data()[m],
                     d2 = d.comp(2).data()[m];
        const double g = ie2 * (d0 * d0 + d1 * d1 + d2 * d2 - 1.0);
        out.comp(0).data()[m] = g * d0;
        out.comp(1).data()[m] = g * d1;
        out.comp(2).data()[m] = g * d2;
    }
    return out;
}

DirectorField3 gl_fprime_apply(const DirectorField3& d, const DirectorField3& b,
                               const GLParams& p) {
    require_same_domain(d.domain(), b.domain(), "gl_fprime_apply");
    const double ie2 = 1.0 / (p.eta * p.eta);
    DirectorField3 out(d.domain());
    const size_t n = d.comp(0).size();
    for (size_t m = 0; m < n; ++m) {
        const double d0 = d.comp(0).data()[m], d1 = d.comp(1).data()[m],
                     d2 = d.comp(2).data()[m];
        const double b0 = b.comp(0).data()[m], b1 = b.comp(1).data()[m],
                     b2 = b.comp(2).data()[m];
        const double r2 = d0 * d0 + d1 * d1 + d2 * d2 - 1.0;
        const double db = d0 * b0 + d1 * b1 + d2 * b2;
        out.comp(0).data()[m] = ie2 * (r2 * b0 + 2.0 * db * d0);
        out.comp(1).data()[m] = ie2 * (r2 * b1 + 2.0 * db * d1);
        out.comp(2).data()[m] = ie2 * (r2 * b2 + 2.0 * db * d2);
    }
    return out;
}

double gl_F_integral(const DirectorField3& d, const GLParams& p) {
    const Domain& dom = d.domain();
    const int nx = dom.nx, ny = dom.ny;
    const double cF = 1.0 / (4.0 * p.eta * p.eta);
    double s = 0.0;
    for (int j = 0; j <= ny; ++j) {
        const double wy = (j == 0 || j == ny) ? 0.5 : 1.0;
        for (int i = 0; i <= nx; ++i) {
            const double wx = (i == 0 || i == nx) ? 0.5 : 1.0;
            const double r2 = d.comp(0)(i, j) * d.comp(0)(i, j) +
                              d.comp(1)(i, j) * d.comp(1)(i, j) +
                              d.comp(2)(i, j) * d.comp(2)(i, j) - 1.0;
            s += wx * wy * r2 * r2;
        }
    }
    return cF * s * dom.h * dom.h;
}

}  // namespace nlc
