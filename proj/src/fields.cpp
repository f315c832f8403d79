#include "nlc/fields.hpp"

#include <cmath>
#include <sstream>

namespace nlc {

Domain::Domain(int nx_, double lx_) : nx(nx_), ny(nx_), lx(lx_), ly(lx_) {
    if (nx < 4) throw validation_error("Domain: nx must be >= 4");
    if (!(lx > 0.0) || !std::isfinite(lx)) throw validation_error("Domain: lx must be positive");
    h = lx / nx;
}

bool Array2::finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

void VectorField2::zero_normal_boundary() {
    for (int j = 0; j < dom_.ny; ++j) {
        u1_(0, j) = 0.0;
        u1_(dom_.nx, j) = 0.0;
    }
    for (int i = 0; i < dom_.nx; ++i) {
        u2_(i, 0) = 0.0;
        u2_(i, dom_.ny) = 0.0;
    }
}

void VectorField2::check_finite(const char* where) const {
    if (!finite()) throw validation_error(std::string("non-finite velocity field in ") + where);
}

VectorField2& VectorField2::operator+=(const VectorField2& o) {
    require_same_domain(dom_, o.dom_, "VectorField2 +=");
    for (size_t n = 0; n < u1_.size(); ++n) u1_.data()[n] += o.u1_.data()[n];
    for (size_t n = 0; n < u2_.size(); ++n) u2_.data()[n] += o.u2_.data()[n];
    return *this;
}
VectorField2& VectorField2::operator-=(const VectorField2& o) {
    require_same_domain(dom_, o.dom_, "VectorField2 -=");
    for (size_t n = 0; n < u1_.size(); ++n) u1_.data()[n] -= o.u1_.data()[n];
    for (size_t n = 0; n < u2_.size(); ++n) u2_.data()[n] -= o.u2_.data()[n];
    return *this;
}
VectorField2& VectorField2::operator*=(double c) {
    for (double& v : u1_.data()) v *= c;
    for (double& v : u2_.data()) v *= c;
    return *this;
}

VectorField2 operator+(VectorField2 a, const VectorField2& b) { return a += b; }
VectorField2 operator-(VectorField2 a, const VectorField2& b) { return a -= b; }
VectorField2 operator*(double c, VectorField2 a) { return a *= c; }

void DirectorField3::check_finite(const char* where) const {
    if (!finite()) throw validation_error(std::string("non-finite director field in ") + where);
}

void DirectorField3::zero_boundary() {
    const int nx = dom_.nx, ny = dom_.ny;
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i <= nx; ++i) {
            d_[k](i, 0) = 0.0;
            d_[k](i, ny) = 0.0;
        }
        for (int j = 0; j <= ny; ++j) {
            d_[k](0, j) = 0.0;
            d_[k](nx, j) = 0.0;
        }
    }
}

void DirectorField3::set_boundary_from(const DirectorField3& src) {
    require_same_domain(dom_, src.dom_, "set_boundary_from");
    const int nx = dom_.nx, ny = dom_.ny;
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i <= nx; ++i) {
            d_[k](i, 0) = src.d_[k](i, 0);
            d_[k](i, ny) = src.d_[k](i, ny);
        }
        for (int j = 0; j <= ny; ++j) {
            d_[k](0, j) = src.d_[k](0, j);
            d_[k](nx, j) = src.d_[k](nx, j);
        }
    }
}

DirectorField3& DirectorField3::operator+=(const DirectorField3& o) {
    require_same_domain(dom_, o.dom_, "DirectorField3 +=");
    for (int k = 0; k < 3; ++k)
        for (size_t n = 0; n < d_[k].size(); ++n) d_[k].data()[n] += o.d_[k].data()[n];
    return *this;
}
DirectorField3& DirectorField3::operator-=(const DirectorField3& o) {
    require_same_domain(dom_, o.dom_, "DirectorField3 -=");
    for (int k = 0; k < 3; ++k)
        for (size_t n = 0; n < d_[k].size(); ++n) d_[k].data()[n] -= o.d_[k].data()[n];
    return *this;
}
DirectorField3& DirectorField3::operator*=(double c) {
    for (int k = 0; k < 3; ++k)
        for (double& v : d_[k].data()) v *= c;
    return *this;
}

DirectorField3 operator+(DirectorField3 a, const DirectorField3& b) { return a += b; }
DirectorField3 operator-(DirectorField3 a, const DirectorField3& b) { return a -= b; }
DirectorField3 operator*(double c, DirectorField3 a) { return a *= c; }

const Params& validate_params(const Params& p) {
    std::ostringstream bad;
    auto pos = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) bad << name << " ";
    };
    pos(p.mu, "mu");
    pos(p.lambda, "lambda");
    pos(p.gamma, "gamma");
    pos(p.eta, "eta");
    if (!std::isfinite(p.sigma0)) bad << "sigma0 ";
    for (size_t k = 0; k < p.sigmas.size(); ++k)
        if (!std::isfinite(p.sigmas[k])) bad << "sigmas[" << k << "] ";
    if (!bad.str().empty())
        throw validation_error("invalid parameters: " + bad.str());
    return p;
}

void require_same_domain(const Domain& a, const Domain& b, const char* what) {
    if (!(a == b)) throw dimension_error(std::string("domain mismatch in ") + what);
}

}  // namespace nlc
