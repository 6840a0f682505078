#pragma once

#include <Eigen/Dense>
#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <vector>

namespace mavaltk::forms {

using Complex = std::complex<double>;

// One exterior monomial dx_I ^ dy_J on R^n x (R^n)*, stored as bit masks
// (bit i-1 <=> index i present). Canonical order: dx block first, then dy
// block, both ascending.
struct FormMonomial {
    std::uint32_t dx_mask = 0;
    std::uint32_t dy_mask = 0;

    auto operator<=>(const FormMonomial&) const = default;

    int dx_degree() const { return __builtin_popcount(dx_mask); }
    int dy_degree() const { return __builtin_popcount(dy_mask); }
    int degree() const { return dx_degree() + dy_degree(); }

    std::vector<int> dx_indices() const;  // 1-based, ascending
    std::vector<int> dy_indices() const;
    static std::uint32_t mask_of(const std::vector<int>& indices_1based);
};

// Constant complex differential form; immutable after construction in
// practice (all operations return new values).
class ConstantForm {
public:
    explicit ConstantForm(int n);

    int dimension() const { return n_; }
    const std::map<FormMonomial, Complex>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    ConstantForm& add_term(FormMonomial m, Complex c);
    Complex coefficient(const FormMonomial& m) const;
    double max_abs() const;
    bool is_zero(double tol = 0.0) const;

    // True iff all monomials share one bidegree (n-k, k); reports it.
    bool homogeneous_bidegree(int& dx_deg, int& dy_deg) const;
    // Degree k for a homogeneous (n-k,k) form; throws if not homogeneous.
    int fiber_degree() const;

    ConstantForm operator+(const ConstantForm& other) const;
    ConstantForm operator-(const ConstantForm& other) const;
    ConstantForm operator*(Complex scalar) const;
    ConstantForm& operator+=(const ConstantForm& other);

private:
    int n_;
    std::map<FormMonomial, Complex> terms_;
};

inline ConstantForm operator*(Complex scalar, const ConstantForm& f) { return f * scalar; }

// Single-monomial helper (1-based index lists).
ConstantForm monomial_form(int n, const std::vector<int>& dx, const std::vector<int>& dy,
                           Complex coeff = Complex(1.0, 0.0));

// Graded-anticommutative exterior product.
ConstantForm wedge(const ConstantForm& a, const ConstantForm& b);

// omega_s = sum_i dx_i ^ dy_i (sign convention of the library).
ConstantForm symplectic_form(int n);

// omega_s ^ tau == 0, tested coefficient-wise with relative tolerance.
bool is_primitive(const ConstantForm& tau, double tol = 1e-12);

struct LefschetzParts {
    ConstantForm primitive;
    ConstantForm remainder;  // omega_s ^ sigma
    ConstantForm sigma;      // bidegree (n-k-1, k-1)
};

// Unique split tau = primitive + omega_s ^ sigma for homogeneous tau.
LefschetzParts lefschetz_project(const ConstantForm& tau);

// Diagonal GL(n) action by pullback: dx_i -> sum_j (g^{-1})_{ij} dx_j,
// dy_i -> sum_j g_{ji} dy_j. Left action: gl_pullback(g*h, tau) ==
// gl_pullback(g, gl_pullback(h, tau)).
ConstantForm gl_pullback(const Eigen::MatrixXd& g, const ConstantForm& tau);

// binom(n,k)^2 - binom(n,k-1)*binom(n,n-k-1)
long primitive_dimension(int n, int k);

// All monomials of bidegree (n-k, k) as single-term forms, in canonical order.
std::vector<FormMonomial> bidegree_monomials(int n, int k);

// Kernel dimension of tau -> omega_s ^ tau on bidegree (n-k,k), numeric rank.
int wedge_kernel_dimension(int n, int k);

// Orthonormal basis (coefficient-wise) of the primitive subspace of (n-k,k).
std::vector<ConstantForm> primitive_basis(int n, int k);

}  // namespace mavaltk::forms
