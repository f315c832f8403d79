#pragma once

#include "nlc/elliptic.hpp"
#include "nlc/fields.hpp"
#include "nlc/norms.hpp"

namespace nlc {

struct GLParams {
    double eta = 1.0;
};

/// Centered MAC advection a . grad w (a interpolated to the faces of w).
VectorField2 advect(const VectorField2& a, const VectorField2& w);
/// Exact discrete adjoint of w -> advect(a, w) in the MAC inner product,
/// restricted to no-slip fields.
VectorField2 advect_adjoint(const VectorField2& a, const VectorField2& b);

/// Skew-symmetric trilinear form: b1(a,b,w) = -b1(a,w,b) holds to rounding
/// and b1(a,w,w) = 0 exactly.
double b1_form(const VectorField2& a, const VectorField2& b, const VectorField2& w);
/// H-representer of b1(a,b,.) on the divergence-free space.
VectorField2 b1_op(const LerayWorkspace& ws, const VectorField2& a, const VectorField2& b);

/// Director advection v . grad d at interior nodes (zero boundary ring).
DirectorField3 advect_director(const VectorField2& v, const DirectorField3& d);
inline DirectorField3 b2_op(const VectorField2& v, const DirectorField3& d) {
    return advect_director(v, d);
}

/// Interior-node L2 pairing used by the b2/m forms.
double inner_interior(const DirectorField3& a, const DirectorField3& b);

/// Skew-split form of v.grad in the (d,b) slots: b2(v,b,b) = 0 exactly for
/// interior-supported b.
double b2_form(const VectorField2& v, const DirectorField3& d, const DirectorField3& b);

/// Stokes operator A1 = P(-Lap) and director operator A2 = -Lap (interior).
VectorField2 apply_a1(const LerayWorkspace& ws, const VectorField2& v);
DirectorField3 apply_a2(const DirectorField3& d);

/// Projected divergence of the Ericksen stress grad d (.) grad b, i.e. the
/// operator M(d,b) of the momentum coupling: <M(d,d),u> = <B2(u,d), Lap d>
/// up to O(h^2).
VectorField2 m_stress_div(const LerayWorkspace& ws, const DirectorField3& d,
                          const DirectorField3& b);
/// Independent weak-form quadrature of <M(d,b),v> (diagnostic companion).
double m_form(const DirectorField3& d, const DirectorField3& b, const VectorField2& v);

/// Ginzburg-Landau relaxation terms.
DirectorField3 gl_f(const DirectorField3& d, const GLParams& p);
DirectorField3 gl_fprime_apply(const DirectorField3& d, const DirectorField3& b,
                               const GLParams& p);
double gl_F_integral(const DirectorField3& d, const GLParams& p);

}  // namespace nlc
