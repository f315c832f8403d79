#pragma once

#include <vector>

#include "nlc/elliptic.hpp"

namespace nlc {

/// Curl of an interior nodal streamfunction (psi = 0 on the boundary ring):
/// the result is exactly divergence-free with exact no-slip normal trace.
VectorField2 curl_of_stream(const Domain& dom, const Array2& psi);

struct StokesModes {
    std::vector<VectorField2> fields;  // inner_h-orthonormal, divergence-free
    std::vector<double> rates;         // A1 eigenvalues, increasing
};

/// First `count` discrete Stokes eigenpairs (A1 restricted to the discrete
/// divergence-free space, parametrized by streamfunctions). Deterministic.
StokesModes compute_stokes_modes(const Domain& dom, int count);

}  // namespace nlc
