#include <cmath>
#include <vector>

#include "nlc/elliptic.hpp"

namespace nlc {

using Trip = Eigen::Triplet<double>;

CellPoissonNeumann::CellPoissonNeumann(const Domain& dom) : dom_(dom) {
    const int nx = dom.nx, ny = dom.ny;
    const int n = nx * ny;
    const double ih2 = 1.0 / (dom.h * dom.h);
    auto idx = [nx](int i, int j) { return j * nx + i; };
    std::vector<Trip> trips;
    trips.reserve(size_t(5) * n);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int me = idx(i, j);
            if (me == 0) {
                trips.emplace_back(0, 0, 1.0);
                continue;
            }
            double diag = 0.0;
            auto nb = [&](int ii, int jj) {
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) return;  // Neumann wall
                diag += ih2;
                const int other = idx(ii, jj);
                if (other != 0) trips.emplace_back(me, other, -ih2);
            };
            nb(i - 1, j);
            nb(i + 1, j);
            nb(i, j - 1);
            nb(i, j + 1);
            trips.emplace_back(me, me, diag);
        }
    }
    mat_.resize(n, n);
    mat_.setFromTriplets(trips.begin(), trips.end());
    fac_.compute(mat_);
    if (fac_.info() != Eigen::Success)
        throw numerical_error("pressure Poisson factorization failed");
}

Array2 CellPoissonNeumann::solve(const Array2& rhs) const {
    const int nx = dom_.nx, ny = dom_.ny;
    Eigen::VectorXd b(nx * ny);
    double mean = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) mean += rhs(i, j);
    mean /= double(nx) * ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) b[j * nx + i] = rhs(i, j) - mean;
    b[0] = 0.0;  // pinned cell
    Eigen::VectorXd x = fac_.solve(b);
    if (fac_.info() != Eigen::Success)
        throw numerical_error("pressure Poisson solve failed");
    Array2 p(nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) p(i, j) = x[j * nx + i];
    return p;
}

Array2 divergence(const VectorField2& w) {
    const Domain& dom = w.domain();
    Array2 out(dom.nx, dom.ny);
    const double ih = 1.0 / dom.h;
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            out(i, j) = (w.u1()(i + 1, j) - w.u1()(i, j) + w.u2()(i, j + 1) - w.u2()(i, j)) * ih;
    return out;
}

double max_divergence(const VectorField2& w) {
    Array2 d = divergence(w);
    double m = 0.0;
    for (double v : d.data()) m = std::max(m, std::abs(v));
    return m;
}

VectorField2 cell_gradient(const Array2& p, const Domain& dom) {
    VectorField2 g(dom);
    const double ih = 1.0 / dom.h;
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 1; i < dom.nx; ++i) g.u1()(i, j) = (p(i, j) - p(i - 1, j)) * ih;
    for (int j = 1; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) g.u2()(i, j) = (p(i, j) - p(i, j - 1)) * ih;
    return g;
}

LerayWorkspace::LerayWorkspace(const Domain& dom, double tol)
    : dom_(dom), tol_(tol), poisson_(dom) {}

VectorField2 LerayWorkspace::project(const VectorField2& w) const {
    require_same_domain(dom_, w.domain(), "leray_project");
    w.check_finite("leray_project");
    Array2 rhs = divergence(w);
    for (double& v : rhs.data()) v = -v;  // solver applies -Lap; want Lap p = div w
    Array2 p = poisson_.solve(rhs);
    VectorField2 out = w;
    out -= cell_gradient(p, dom_);
    out.zero_normal_boundary();
    double wmax = 0.0;
    for (double v : w.u1().data()) wmax = std::max(wmax, std::abs(v));
    for (double v : w.u2().data()) wmax = std::max(wmax, std::abs(v));
    const double scale = wmax / dom_.h;  // divergence carries a 1/h
    const double res = max_divergence(out);
    if (res > tol_ * std::max(1.0, scale))
        throw numerical_error("leray_project residual " + std::to_string(res) + " exceeds tolerance");
    return out;
}

}  // namespace nlc
