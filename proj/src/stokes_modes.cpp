#include "nlc/stokes_modes.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "nlc/norms.hpp"

namespace nlc {

VectorField2 curl_of_stream(const Domain& dom, const Array2& psi) {
    if (psi.nx() != dom.nx + 1 || psi.ny() != dom.ny + 1)
        throw dimension_error("curl_of_stream: streamfunction must be nodal");
    VectorField2 v(dom);
    const double ih = 1.0 / dom.h;
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 1; i < dom.nx; ++i) v.u1()(i, j) = (psi(i, j + 1) - psi(i, j)) * ih;
    for (int j = 1; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) v.u2()(i, j) = -(psi(i + 1, j) - psi(i, j)) * ih;
    return v;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

// Sparse curl matrix: interior nodes -> stacked interior faces.
SpMat curl_matrix(const Domain& dom) {
    const int nx = dom.nx, ny = dom.ny;
    const int nf1 = (nx - 1) * ny;
    const int nf = nf1 + nx * (ny - 1);
    const int nn = (nx - 1) * (ny - 1);
    const double ih = 1.0 / dom.h;
    auto node = [nx](int i, int j) { return (j - 1) * (nx - 1) + (i - 1); };
    std::vector<Trip> t;
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const int row = j * (nx - 1) + (i - 1);
            if (j + 1 <= ny - 1) t.emplace_back(row, node(i, j + 1), ih);
            if (j >= 1) t.emplace_back(row, node(i, j), -ih);
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int row = nf1 + (j - 1) * nx + i;
            if (i + 1 <= nx - 1) t.emplace_back(row, node(i + 1, j), -ih);
            if (i >= 1) t.emplace_back(row, node(i, j), ih);
        }
    SpMat c(nf, nn);
    c.setFromTriplets(t.begin(), t.end());
    return c;
}

// Stacked negative MAC Laplacian on interior faces (ghost reflection walls).
SpMat face_neg_laplacian(const Domain& dom) {
    const int nx = dom.nx, ny = dom.ny;
    const int nf1 = (nx - 1) * ny;
    const int nf = nf1 + nx * (ny - 1);
    const double ih2 = 1.0 / (dom.h * dom.h);
    std::vector<Trip> t;
    auto f1 = [nx](int i, int j) { return j * (nx - 1) + (i - 1); };
    auto f2 = [nx, nf1](int i, int j) { return nf1 + (j - 1) * nx + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const int me = f1(i, j);
            const bool wall = j == 0 || j == ny - 1;
            t.emplace_back(me, me, (wall ? 5.0 : 4.0) * ih2);
            if (i > 1) t.emplace_back(me, f1(i - 1, j), -ih2);
            if (i < nx - 1) t.emplace_back(me, f1(i + 1, j), -ih2);
            if (j > 0) t.emplace_back(me, f1(i, j - 1), -ih2);
            if (j < ny - 1) t.emplace_back(me, f1(i, j + 1), -ih2);
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int me = f2(i, j);
            const bool wall = i == 0 || i == nx - 1;
            t.emplace_back(me, me, (wall ? 5.0 : 4.0) * ih2);
            if (i > 0) t.emplace_back(me, f2(i - 1, j), -ih2);
            if (i < nx - 1) t.emplace_back(me, f2(i + 1, j), -ih2);
            if (j > 1) t.emplace_back(me, f2(i, j - 1), -ih2);
            if (j < ny - 1) t.emplace_back(me, f2(i, j + 1), -ih2);
        }
    SpMat l(nf, nf);
    l.setFromTriplets(t.begin(), t.end());
    return l;
}

}  // namespace

StokesModes compute_stokes_modes(const Domain& dom, int count) {
    const int nn = (dom.nx - 1) * (dom.ny - 1);
    if (count < 1 || count > nn) throw validation_error("compute_stokes_modes: bad mode count");
    const double h2 = dom.h * dom.h;

    SpMat c = curl_matrix(dom);
    SpMat l = face_neg_laplacian(dom);
    SpMat ct = SpMat(c.transpose());
    SpMat a = (ct * (l * c).eval()).eval() * h2;  // psi-space stiffness Curl^T (-Lap) Curl
    SpMat b = (ct * c).eval() * h2;               // psi-space mass Curl^T Curl

    Eigen::SimplicialLDLT<SpMat> afac;
    afac.compute(a);
    if (afac.info() != Eigen::Success)
        throw numerical_error("Stokes mode stiffness factorization failed");

    // Inverse subspace iteration on the pencil (A, B) with B-orthonormal basis.
    const int mm = std::min(count + 3, nn);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    Eigen::MatrixXd x(nn, mm);
    for (int q = 0; q < mm; ++q)
        for (int r = 0; r < nn; ++r)
            x(r, q) = double(rng() >> 11) * (1.0 / 9007199254740992.0) - 0.5;

    auto b_orthonormalize = [&](Eigen::MatrixXd& y) {
        for (int q = 0; q < y.cols(); ++q) {
            Eigen::VectorXd by = b * y.col(q);
            for (int p = 0; p < q; ++p) y.col(q) -= (b * y.col(p)).dot(y.col(q)) * y.col(p);
            by = b * y.col(q);
            const double nrm = std::sqrt(by.dot(y.col(q)));
            if (nrm < 1e-300) throw numerical_error("Stokes mode basis degenerated");
            y.col(q) /= nrm;
        }
    };

    b_orthonormalize(x);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(mm);
    for (int it = 0; it < 400; ++it) {
        Eigen::MatrixXd y(nn, mm);
        for (int q = 0; q < mm; ++q) y.col(q) = afac.solve((b * x.col(q)).eval());
        b_orthonormalize(y);
        x = y;
        Eigen::MatrixXd ar = x.transpose() * (a * x);
        Eigen::MatrixXd br = x.transpose() * (b * x);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ar, br);
        if (es.info() != Eigen::Success) throw numerical_error("Ritz eigensolve failed");
        x = x * es.eigenvectors();
        const Eigen::VectorXd vals = es.eigenvalues();
        if (it > 4 && (vals - prev).cwiseAbs().maxCoeff() <= 1e-12 * vals.cwiseAbs().maxCoeff())
            break;
        prev = vals;
    }

    Eigen::MatrixXd ar = x.transpose() * (a * x);
    Eigen::MatrixXd br = x.transpose() * (b * x);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ar, br);
    Eigen::MatrixXd modes = x * es.eigenvectors();

    StokesModes out;
    const int nx = dom.nx, ny = dom.ny;
    for (int q = 0; q < count; ++q) {
        Array2 psi(nx + 1, ny + 1);
        for (int j = 1; j < ny; ++j)
            for (int i = 1; i < nx; ++i) psi(i, j) = modes((j - 1) * (nx - 1) + (i - 1), q);
        VectorField2 v = curl_of_stream(dom, psi);
        const double nrm = std::sqrt(inner_h(v, v));
        v *= 1.0 / nrm;
        out.fields.push_back(std::move(v));
        out.rates.push_back(es.eigenvalues()[q]);
    }
    return out;
}

}  // namespace nlc
