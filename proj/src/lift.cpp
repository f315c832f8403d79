#include "nlc/lift.hpp"

#include <cmath>

#include "nlc/elliptic.hpp"

namespace nlc {

DirectorField3 harmonic_lift(const DirectorField3& src) {
    const Domain& dom = src.domain();
    NodalHelmholtz helm(dom, 0.0);
    DirectorField3 out(dom);
    Array2 zero_rhs(dom.nx + 1, dom.ny + 1);
    for (int k = 0; k < 3; ++k) out.comp(k) = helm.solve(zero_rhs, src.comp(k));
    // interior harmonic residual check
    DirectorField3 lap = neg_laplacian(out);
    double res = 0.0, scale = 1.0;
    for (int k = 0; k < 3; ++k) {
        for (double v : lap.comp(k).data()) res = std::max(res, std::abs(v));
        for (double v : out.comp(k).data()) scale = std::max(scale, std::abs(v));
    }
    if (res > 1e-10 * scale / (dom.h * dom.h))
        throw numerical_error("harmonic lift residual too large");
    return out;
}

DirectorField3 director_boundary_preset(const Domain& dom, const std::string& preset,
                                        const BoundaryTrace* jump) {
    DirectorField3 d(dom);
    for (int j = 0; j <= dom.ny; ++j) {
        for (int i = 0; i <= dom.nx; ++i) {
            const double x = i * dom.h, y = j * dom.h;
            double v[3];
            if (preset == "constant-z") {
                v[0] = 0.0;
                v[1] = 0.0;
                v[2] = 1.0;
            } else if (preset == "tilted") {
                // smooth unit field, constant-z on the boundary-normal part
                const double a = 0.4 * std::sin(M_PI * x) * std::sin(M_PI * y);
                v[0] = std::sin(a);
                v[1] = 0.0;
                v[2] = std::cos(a);
            } else {
                throw validation_error("unknown director preset: " + preset);
            }
            if (jump) {
                double nv[3];
                eval_boundary_trace(*jump, x, y, nv);
                for (int k = 0; k < 3; ++k) v[k] += nv[k];
            }
            for (int k = 0; k < 3; ++k) d.comp(k)(i, j) = v[k];
        }
    }
    return d;
}

}  // namespace nlc
