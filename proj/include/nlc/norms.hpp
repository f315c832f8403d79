#pragma once

#include "nlc/fields.hpp"

namespace nlc {

/// L2 inner product of MAC velocity fields, trapezoid-weighted so that
/// constants integrate exactly over the domain.
double inner_h(const VectorField2& a, const VectorField2& b);

/// Nodal L2 inner product of director fields (trapezoid weights).
double inner_h(const DirectorField3& a, const DirectorField3& b);

/// Discrete H^m Sobolev norm, m in {0,1,2,3}. Centered differences in the
/// interior, one-sided at the boundary; m = 0 is the L2 norm.
double norm_hm(const VectorField2& f, int m);
double norm_hm(const DirectorField3& f, int m);

/// Sum over all |alpha| = order derivative combinations of |D^alpha g|_2^2
/// for a single grid function with spacing h (used by the norms above).
double deriv_l2sq(const Array2& g, double h, int order, bool trapezoid_weights);

}  // namespace nlc
