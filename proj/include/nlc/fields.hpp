#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlc {

/// Square domain [0,lx] x [0,ly] with an nx x ny cell grid, h = lx/nx.
struct Domain {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;
    double h = 0.0;

    Domain() = default;
    Domain(int nx_, double lx_ = 1.0);

    bool operator==(const Domain& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

struct dimension_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Row-major 2-D array of doubles.
class Array2 {
public:
    Array2() = default;
    Array2(int nx, int ny, double fill = 0.0) : nx_(nx), ny_(ny), a_(size_t(nx) * ny, fill) {}

    double& operator()(int i, int j) { return a_[size_t(j) * nx_ + i]; }
    double operator()(int i, int j) const { return a_[size_t(j) * nx_ + i]; }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    size_t size() const { return a_.size(); }
    std::span<double> data() { return a_; }
    std::span<const double> data() const { return a_; }

    bool finite() const;

private:
    int nx_ = 0, ny_ = 0;
    std::vector<double> a_;
};

/// MAC-staggered velocity: u1 on vertical faces ((nx+1) x ny),
/// u2 on horizontal faces (nx x (ny+1)).
class VectorField2 {
public:
    VectorField2() = default;
    explicit VectorField2(const Domain& dom)
        : dom_(dom), u1_(dom.nx + 1, dom.ny), u2_(dom.nx, dom.ny + 1) {}

    const Domain& domain() const { return dom_; }
    Array2& u1() { return u1_; }
    Array2& u2() { return u2_; }
    const Array2& u1() const { return u1_; }
    const Array2& u2() const { return u2_; }

    /// Zero out boundary-normal face values (discrete no-slip normal part).
    void zero_normal_boundary();
    bool finite() const { return u1_.finite() && u2_.finite(); }
    void check_finite(const char* where) const;

    VectorField2& operator+=(const VectorField2& o);
    VectorField2& operator-=(const VectorField2& o);
    VectorField2& operator*=(double c);

private:
    Domain dom_;
    Array2 u1_, u2_;
};

VectorField2 operator+(VectorField2 a, const VectorField2& b);
VectorField2 operator-(VectorField2 a, const VectorField2& b);
VectorField2 operator*(double c, VectorField2 a);

/// Node-centered director field, three components on (nx+1) x (ny+1) nodes
/// including the boundary ring.
class DirectorField3 {
public:
    DirectorField3() = default;
    explicit DirectorField3(const Domain& dom) : dom_(dom) {
        for (auto& c : d_) c = Array2(dom.nx + 1, dom.ny + 1);
    }

    const Domain& domain() const { return dom_; }
    Array2& comp(int k) { return d_[k]; }
    const Array2& comp(int k) const { return d_[k]; }

    bool finite() const { return d_[0].finite() && d_[1].finite() && d_[2].finite(); }
    void check_finite(const char* where) const;
    void zero_boundary();
    /// Copy the boundary ring of `src` onto this field.
    void set_boundary_from(const DirectorField3& src);

    DirectorField3& operator+=(const DirectorField3& o);
    DirectorField3& operator-=(const DirectorField3& o);
    DirectorField3& operator*=(double c);

private:
    Domain dom_;
    Array2 d_[3];
};

DirectorField3 operator+(DirectorField3 a, const DirectorField3& b);
DirectorField3 operator-(DirectorField3 a, const DirectorField3& b);
DirectorField3 operator*(double c, DirectorField3 a);

/// Physical and noise parameters of the coupled system.
struct Params {
    double mu = 1.0;      // viscosity
    double lambda = 1.0;  // elastic coupling
    double gamma = 1.0;   // director relaxation
    double eta = 1.0;     // Ginzburg-Landau length
    double sigma0 = 0.0;  // additive channel amplitude
    std::vector<double> sigmas;  // multiplicative channel amplitudes

    int channels() const { return int(sigmas.size()); }
};

/// Throws validation_error naming every offending field.
const Params& validate_params(const Params& p);

void require_same_domain(const Domain& a, const Domain& b, const char* what);

}  // namespace nlc
