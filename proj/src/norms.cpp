#include "nlc/norms.hpp"

#include <cmath>

namespace nlc {

namespace {

double quad_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

double l2sq(const Array2& g, double h, bool trap) {
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        const double wj = trap ? quad_weight(j, g.ny()) : 1.0;
        for (int i = 0; i < g.nx(); ++i) {
            const double wi = trap ? quad_weight(i, g.nx()) : 1.0;
            s += wi * wj * g(i, j) * g(i, j);
        }
    }
    return s * h * h;
}

Array2 dx(const Array2& g, double h) {
    Array2 out(g.nx(), g.ny());
    const int n = g.nx();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < n; ++i) {
            if (i == 0)
                out(i, j) = (g(1, j) - g(0, j)) / h;
            else if (i == n - 1)
                out(i, j) = (g(n - 1, j) - g(n - 2, j)) / h;
            else
                out(i, j) = (g(i + 1, j) - g(i - 1, j)) / (2.0 * h);
        }
    }
    return out;
}

Array2 dy(const Array2& g, double h) {
    Array2 out(g.nx(), g.ny());
    const int n = g.ny();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (j == 0)
                out(i, j) = (g(i, 1) - g(i, 0)) / h;
            else if (j == n - 1)
                out(i, j) = (g(i, n - 1) - g(i, n - 2)) / h;
            else
                out(i, j) = (g(i, j + 1) - g(i, j - 1)) / (2.0 * h);
        }
    }
    return out;
}

}  // namespace

double deriv_l2sq(const Array2& g, double h, int order, bool trap) {
    double total = 0.0;
    for (int ax = 0; ax <= order; ++ax) {
        const int ay = order - ax;
        Array2 cur = g;
        for (int r = 0; r < ax; ++r) cur = dx(cur, h);
        for (int r = 0; r < ay; ++r) cur = dy(cur, h);
        total += l2sq(cur, h, trap);
    }
    return total;
}

double inner_h(const VectorField2& a, const VectorField2& b) {
    require_same_domain(a.domain(), b.domain(), "inner_h");
    const Domain& dom = a.domain();
    const double h2 = dom.h * dom.h;
    double s = 0.0;
    // u1 lives on (nx+1) x ny faces: trapezoid weights in x only.
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i)
            s += quad_weight(i, dom.nx + 1) * a.u1()(i, j) * b.u1()(i, j);
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            s += quad_weight(j, dom.ny + 1) * a.u2()(i, j) * b.u2()(i, j);
    return s * h2;
}

double inner_h(const DirectorField3& a, const DirectorField3& b) {
    require_same_domain(a.domain(), b.domain(), "inner_h");
    const Domain& dom = a.domain();
    const double h2 = dom.h * dom.h;
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j <= dom.ny; ++j)
            for (int i = 0; i <= dom.nx; ++i)
                s += quad_weight(i, dom.nx + 1) * quad_weight(j, dom.ny + 1) *
                     a.comp(k)(i, j) * b.comp(k)(i, j);
    return s * h2;
}

namespace {

void check_m(int m) {
    if (m < 0 || m > 3) throw std::invalid_argument("norm_hm: m must be in {0,1,2,3}");
}

}  // namespace

double norm_hm(const VectorField2& f, int m) {
    check_m(m);
    if (m == 0) return std::sqrt(inner_h(f, f));
    const double h = f.domain().h;
    double s = 0.0;
    for (int order = 0; order <= m; ++order) {
        s += deriv_l2sq(f.u1(), h, order, true);
        s += deriv_l2sq(f.u2(), h, order, true);
    }
    return std::sqrt(s);
}

double norm_hm(const DirectorField3& f, int m) {
    check_m(m);
    if (m == 0) return std::sqrt(inner_h(f, f));
    const double h = f.domain().h;
    double s = 0.0;
    for (int order = 0; order <= m; ++order)
        for (int k = 0; k < 3; ++k) s += deriv_l2sq(f.comp(k), h, order, true);
    return std::sqrt(s);
}

}  // namespace nlc
