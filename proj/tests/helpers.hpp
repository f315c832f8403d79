#pragma once

#include <cmath>

#include "nlc/fields.hpp"
#include "nlc/noise.hpp"

namespace testutil {

inline nlc::VectorField2 random_velocity(const nlc::Domain& dom, nlc::Rng& rng) {
    nlc::VectorField2 v(dom);
    for (double& x : v.u1().data()) x = rng.uniform(-1.0, 1.0);
    for (double& x : v.u2().data()) x = rng.uniform(-1.0, 1.0);
    v.zero_normal_boundary();
    return v;
}

inline nlc::DirectorField3 random_director(const nlc::Domain& dom, nlc::Rng& rng,
                                           bool zero_ring) {
    nlc::DirectorField3 d(dom);
    for (int k = 0; k < 3; ++k)
        for (double& x : d.comp(k).data()) x = rng.uniform(-1.0, 1.0);
    if (zero_ring) d.zero_boundary();
    return d;
}

// smooth divergence-free velocity from the stream function
// psi = sin^2(pi x) sin^2(pi y) / pi
inline nlc::VectorField2 smooth_velocity(const nlc::Domain& dom, double amp) {
    nlc::VectorField2 v(dom);
    auto psi = [&](double x, double y) {
        const double sx = std::sin(M_PI * x), sy = std::sin(M_PI * y);
        return amp * sx * sx * sy * sy / M_PI;
    };
    const double h = dom.h;
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 1; i < dom.nx; ++i)
            v.u1()(i, j) = (psi(i * h, (j + 1) * h) - psi(i * h, j * h)) / h;
    for (int j = 1; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            v.u2()(i, j) = -(psi((i + 1) * h, j * h) - psi(i * h, j * h)) / h;
    return v;
}

inline nlc::DirectorField3 smooth_director(const nlc::Domain& dom) {
    nlc::DirectorField3 d(dom);
    for (int j = 0; j <= dom.ny; ++j)
        for (int i = 0; i <= dom.nx; ++i) {
            const double x = i * dom.h, y = j * dom.h;
            d.comp(0)(i, j) = std::sin(M_PI * x) * std::sin(M_PI * y);
            d.comp(1)(i, j) = std::cos(M_PI * x) * std::sin(M_PI * y);
            d.comp(2)(i, j) = 0.5;
        }
    return d;
}

inline double max_abs_diff(const nlc::VectorField2& a, const nlc::VectorField2& b) {
    double m = 0.0;
    for (size_t k = 0; k < a.u1().size(); ++k)
        m = std::max(m, std::abs(a.u1().data()[k] - b.u1().data()[k]));
    for (size_t k = 0; k < a.u2().size(); ++k)
        m = std::max(m, std::abs(a.u2().data()[k] - b.u2().data()[k]));
    return m;
}

inline double max_abs_diff(const nlc::DirectorField3& a, const nlc::DirectorField3& b) {
    double m = 0.0;
    for (int k = 0; k < 3; ++k)
        for (size_t q = 0; q < a.comp(k).size(); ++q)
            m = std::max(m, std::abs(a.comp(k).data()[q] - b.comp(k).data()[q]));
    return m;
}

}  // namespace testutil
