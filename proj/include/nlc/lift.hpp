#pragma once

#include <string>

#include "nlc/fields.hpp"
#include "nlc/noise.hpp"

namespace nlc {

/// Discrete-harmonic extension of the boundary ring of `src` into the
/// interior (5-point Laplacian, residual <= 1e-10 checked).
DirectorField3 harmonic_lift(const DirectorField3& src);

/// Nodal director boundary data R_d for a named preset ("constant-z",
/// "tilted"), optionally shifted by a compound Poisson trace N(t).
/// Interior nodes are filled with the same closed form (usable as initial
/// data); only the ring is authoritative for boundary purposes.
DirectorField3 director_boundary_preset(const Domain& dom, const std::string& preset,
                                        const BoundaryTrace* jump = nullptr);

}  // namespace nlc
