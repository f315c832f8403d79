#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "nlc/fields.hpp"

namespace nlc {

/// Cell-centered Poisson solve with homogeneous Neumann walls (the pressure
/// problem of the MAC projection). The constant nullspace is pinned at cell 0;
/// the right-hand side must be discretely compatible (zero mean).
class CellPoissonNeumann {
public:
    explicit CellPoissonNeumann(const Domain& dom);
    /// Solves -div grad p = rhs (cell array nx x ny), returns p with p(0,0)=0.
    Array2 solve(const Array2& rhs) const;
    const Domain& domain() const { return dom_; }

private:
    Domain dom_;
    Eigen::SparseMatrix<double> mat_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fac_;
};

/// Node-centered Helmholtz solve (c0*I - Lap) with Dirichlet boundary nodes.
/// c0 = 0 gives the Poisson problem used for harmonic lifts.
class NodalHelmholtz {
public:
    NodalHelmholtz(const Domain& dom, double c0);
    /// rhs and bc are nodal arrays; interior of the result solves
    /// c0*x - Lap x = rhs with x = bc on the boundary ring.
    Array2 solve(const Array2& rhs, const Array2& bc) const;
    double c0() const { return c0_; }

private:
    Domain dom_;
    double c0_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fac_;
};

/// Face-centered Helmholtz solve (c0*I - Lap) on MAC velocity components with
/// no-slip walls (ghost reflection for the tangential direction).
class MacHelmholtz {
public:
    MacHelmholtz(const Domain& dom, double c0);
    VectorField2 solve(const VectorField2& rhs) const;
    double c0() const { return c0_; }

private:
    Domain dom_;
    double c0_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fac1_, fac2_;
};

/// Discrete MAC divergence (cell array) and cell-gradient (face field).
Array2 divergence(const VectorField2& w);
double max_divergence(const VectorField2& w);
VectorField2 cell_gradient(const Array2& p, const Domain& dom);

/// Negative MAC Laplacian with no-slip walls, zero on boundary faces.
VectorField2 neg_laplacian(const VectorField2& v);

/// Negative nodal 5-point Laplacian of each director component on interior
/// nodes (boundary values of d enter the stencil); boundary of result is 0.
DirectorField3 neg_laplacian(const DirectorField3& d);

/// Leray projection workspace: removes the discrete gradient part of a MAC
/// field, leaving an exactly divergence-free no-slip field.
class LerayWorkspace {
public:
    explicit LerayWorkspace(const Domain& dom, double tol = 1e-10);
    VectorField2 project(const VectorField2& w) const;
    double tolerance() const { return tol_; }
    const Domain& domain() const { return dom_; }

private:
    Domain dom_;
    double tol_;
    CellPoissonNeumann poisson_;
};

}  // namespace nlc
