#include "mavaltk/forms.hpp"

#include <algorithm>
#include <stdexcept>

namespace mavaltk::forms {

namespace {

// Parity of inversions when interleaving the sorted word of `b` after the
// sorted word of `a`: one inversion per pair (x in a, y in b) with x > y.
int merge_sign(std::uint32_t a, std::uint32_t b) {
    int inversions = 0;
    while (b) {
        const int bit = __builtin_ctz(b);
        b &= b - 1;
        const std::uint32_t above = (bit == 31) ? 0u : (a >> (bit + 1)) << (bit + 1);
        inversions += __builtin_popcount(above);
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

void enumerate_subsets(int n, int size, std::vector<std::uint32_t>& out) {
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    if (size == 0) {
        out.push_back(0);
        return;
    }
    if (size > n) return;
    while (true) {
        std::uint32_t mask = 0;
        for (int i : idx) mask |= 1u << i;
        out.push_back(mask);
        int pos = size - 1;
        while (pos >= 0 && idx[pos] == n - size + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
    }
}

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// Matrix of tau -> omega_s ^ tau, rows indexed by the target monomial list,
// columns by the source list.
Eigen::MatrixXd wedge_with_symplectic_matrix(int n,
                                             const std::vector<FormMonomial>& source,
                                             const std::vector<FormMonomial>& target) {
    std::map<FormMonomial, int> target_index;
    for (size_t i = 0; i < target.size(); ++i) target_index[target[i]] = static_cast<int>(i);
    const ConstantForm omega = symplectic_form(n);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<long>(target.size()),
                                              static_cast<long>(source.size()));
    for (size_t j = 0; j < source.size(); ++j) {
        ConstantForm m(n);
        m.add_term(source[j], Complex(1.0, 0.0));
        const ConstantForm im = wedge(omega, m);
        for (const auto& [mono, c] : im.terms()) L(target_index.at(mono), static_cast<long>(j)) = c.real();
    }
    return L;
}

}  // namespace

std::vector<int> FormMonomial::dx_indices() const {
    std::vector<int> out;
    for (std::uint32_t m = dx_mask; m; m &= m - 1) out.push_back(__builtin_ctz(m) + 1);
    return out;
}

std::vector<int> FormMonomial::dy_indices() const {
    std::vector<int> out;
    for (std::uint32_t m = dy_mask; m; m &= m - 1) out.push_back(__builtin_ctz(m) + 1);
    return out;
}

std::uint32_t FormMonomial::mask_of(const std::vector<int>& indices_1based) {
    std::uint32_t m = 0;
    for (int i : indices_1based) {
        if (i < 1 || i > 32) throw std::invalid_argument("form index out of range");
        if (m & (1u << (i - 1))) throw std::invalid_argument("repeated form index");
        m |= 1u << (i - 1);
    }
    return m;
}

ConstantForm::ConstantForm(int n) : n_(n) {
    if (n < 1 || n > 30) throw std::invalid_argument("dimension must be in [1,30]");
}

ConstantForm& ConstantForm::add_term(FormMonomial m, Complex c) {
    if ((m.dx_mask | m.dy_mask) >> n_) throw std::invalid_argument("monomial index exceeds dimension");
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (c != Complex(0.0, 0.0)) terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == Complex(0.0, 0.0)) terms_.erase(it);
    }
    return *this;
}

Complex ConstantForm::coefficient(const FormMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

double ConstantForm::max_abs() const {
    double m = 0.0;
    for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

bool ConstantForm::is_zero(double tol) const {
    return max_abs() <= tol;
}

bool ConstantForm::homogeneous_bidegree(int& dx_deg, int& dy_deg) const {
    if (terms_.empty()) {
        dx_deg = dy_deg = 0;
        return true;
    }
    auto it = terms_.begin();
    dx_deg = it->first.dx_degree();
    dy_deg = it->first.dy_degree();
    for (const auto& [mono, c] : terms_)
        if (mono.dx_degree() != dx_deg || mono.dy_degree() != dy_deg) return false;
    return true;
}

int ConstantForm::fiber_degree() const {
    int p = 0, q = 0;
    if (!homogeneous_bidegree(p, q)) throw std::invalid_argument("form is not bidegree-homogeneous");
    if (!terms_.empty() && p + q != n_) throw std::invalid_argument("form total degree is not n");
    return q;
}

ConstantForm ConstantForm::operator+(const ConstantForm& other) const {
    ConstantForm out = *this;
    out += other;
    return out;
}

ConstantForm& ConstantForm::operator+=(const ConstantForm& other) {
    if (other.n_ != n_) throw std::invalid_argument("dimension mismatch");
    for (const auto& [mono, c] : other.terms_) add_term(mono, c);
    return *this;
}

ConstantForm ConstantForm::operator-(const ConstantForm& other) const {
    return *this + other * Complex(-1.0, 0.0);
}

ConstantForm ConstantForm::operator*(Complex scalar) const {
    ConstantForm out(n_);
    if (scalar == Complex(0.0, 0.0)) return out;
    for (const auto& [mono, c] : terms_) out.terms_.emplace(mono, c * scalar);
    return out;
}

ConstantForm monomial_form(int n, const std::vector<int>& dx, const std::vector<int>& dy, Complex coeff) {
    ConstantForm f(n);
    FormMonomial m{FormMonomial::mask_of(dx), FormMonomial::mask_of(dy)};
    f.add_term(m, coeff);
    return f;
}

ConstantForm wedge(const ConstantForm& a, const ConstantForm& b) {
    if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch");
    ConstantForm out(a.dimension());
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            if ((ma.dx_mask & mb.dx_mask) || (ma.dy_mask & mb.dy_mask)) continue;
            // word dxI1 dyJ1 dxI2 dyJ2 -> dx(I1|I2) dy(J1|J2)
            int sign = ((ma.dy_degree() * mb.dx_degree()) % 2 == 0) ? 1 : -1;
            sign *= merge_sign(ma.dx_mask, mb.dx_mask);
            sign *= merge_sign(ma.dy_mask, mb.dy_mask);
            out.add_term(FormMonomial{ma.dx_mask | mb.dx_mask, ma.dy_mask | mb.dy_mask},
                         static_cast<double>(sign) * ca * cb);
        }
    }
    return out;
}

ConstantForm symplectic_form(int n) {
    ConstantForm out(n);
    for (int i = 1; i <= n; ++i) out.add_term(FormMonomial{1u << (i - 1), 1u << (i - 1)}, Complex(1.0, 0.0));
    return out;
}

bool is_primitive(const ConstantForm& tau, double tol) {
    int p = 0, q = 0;
    if (!tau.homogeneous_bidegree(p, q)) throw std::invalid_argument("form is not bidegree-homogeneous");
    const ConstantForm w = wedge(symplectic_form(tau.dimension()), tau);
    return w.max_abs() <= tol * (1.0 + tau.max_abs());
}

std::vector<FormMonomial> bidegree_monomials(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("k out of range");
    std::vector<std::uint32_t> dx_sets, dy_sets;
    enumerate_subsets(n, n - k, dx_sets);
    enumerate_subsets(n, k, dy_sets);
    std::vector<FormMonomial> out;
    out.reserve(dx_sets.size() * dy_sets.size());
    for (auto dx : dx_sets)
        for (auto dy : dy_sets) out.push_back(FormMonomial{dx, dy});
    std::sort(out.begin(), out.end());
    return out;
}

LefschetzParts lefschetz_project(const ConstantForm& tau) {
    const int n = tau.dimension();
    int p = 0, q = 0;
    if (!tau.homogeneous_bidegree(p, q)) throw std::invalid_argument("form is not bidegree-homogeneous");
    if (!tau.terms().empty() && p + q != n) throw std::invalid_argument("inadmissible bidegree");
    const int k = tau.terms().empty() ? 0 : q;

    LefschetzParts parts{ConstantForm(n), ConstantForm(n), ConstantForm(n)};
    if (k == 0 || n - k == 0) {
        // sigma lives in bidegree (n-k-1, k-1), which is empty here
        parts.primitive = tau;
        return parts;
    }

    const auto sigma_basis = bidegree_monomials(n, k - 1);
    const auto mid_basis = bidegree_monomials(n, k);
    const auto top_basis = bidegree_monomials(n, k + 1);

    // Solve (L2 L1) sigma = L2 tau where L1: sigma -> w^sigma, L2: mid -> top.
    const Eigen::MatrixXd L1 = wedge_with_symplectic_matrix(n, k - 1, sigma_basis, mid_basis);
    const Eigen::MatrixXd L2 = wedge_with_symplectic_matrix(n, k, mid_basis, top_basis);
    const Eigen::MatrixXd A = L2 * L1;

    Eigen::VectorXcd tau_vec = Eigen::VectorXcd::Zero(static_cast<long>(mid_basis.size()));
    for (size_t i = 0; i < mid_basis.size(); ++i) tau_vec(static_cast<long>(i)) = tau.coefficient(mid_basis[i]);
    const Eigen::VectorXcd rhs = L2.cast<Complex>() * tau_vec;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < A.cols()) throw std::runtime_error("Lefschetz system has nontrivial kernel");
    const Eigen::VectorXcd sig_re = svd.solve(rhs.real());
    const Eigen::VectorXcd sig_im = svd.solve(rhs.imag());

    for (size_t i = 0; i < sigma_basis.size(); ++i) {
        const Complex c(sig_re(static_cast<long>(i)).real(), sig_im(static_cast<long>(i)).real());
        parts.sigma.add_term(sigma_basis[i], c);
    }
    parts.remainder = wedge(symplectic_form(n), parts.sigma);
    parts.primitive = tau - parts.remainder;
    return parts;
}

ConstantForm gl_pullback(const Eigen::MatrixXd& g, const ConstantForm& tau) {
    const int n = tau.dimension();
    if (g.rows() != n || g.cols() != n) throw std::invalid_argument("dimension mismatch");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    if (!lu.isInvertible()) throw std::invalid_argument("singular matrix");
    const Eigen::MatrixXd ginv = lu.inverse();

    // dx_I -> sum_{I'} det(ginv[I, I']) dx_{I'} ; dy_J -> sum_{J'} det(g[J', J]) dy_{J'}.
    // Blocks transform independently, so no cross signs appear.
    ConstantForm out(n);
    for (const auto& [mono, c] : tau.terms()) {
        const auto I = mono.dx_indices();
        const auto J = mono.dy_indices();
        std::vector<std::uint32_t> dx_targets, dy_targets;
        enumerate_subsets(n, static_cast<int>(I.size()), dx_targets);
        enumerate_subsets(n, static_cast<int>(J.size()), dy_targets);
        for (auto dxm : dx_targets) {
            const auto Ip = FormMonomial{dxm, 0}.dx_indices();
            Eigen::MatrixXd sub(I.size(), I.size());
            for (size_t r = 0; r < I.size(); ++r)
                for (size_t s = 0; s < Ip.size(); ++s) sub(static_cast<long>(r), static_cast<long>(s)) = ginv(I[r] - 1, Ip[s] - 1);
            const double dxi = I.empty() ? 1.0 : sub.determinant();
            if (dxi == 0.0) continue;
            for (auto dym : dy_targets) {
                const auto Jp = FormMonomial{dym, 0}.dx_indices();
                Eigen::MatrixXd suby(J.size(), J.size());
                for (size_t r = 0; r < Jp.size(); ++r)
                    for (size_t s = 0; s < J.size(); ++s) suby(static_cast<long>(r), static_cast<long>(s)) = g(Jp[r] - 1, J[s] - 1);
                const double dyi = J.empty() ? 1.0 : suby.determinant();
                if (dyi == 0.0) continue;
                out.add_term(FormMonomial{dxm, dym}, c * dxi * dyi);
            }
        }
    }
    return out;
}

long primitive_dimension(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("k out of range");
    return binom(n, k) * binom(n, k) - binom(n, k - 1) * binom(n, n - k - 1);
}

int wedge_kernel_dimension(int n, int k) {
    const auto source = bidegree_monomials(n, k);
    const auto target = bidegree_monomials(n, k + 1);
    if (target.empty())
        return static_cast<int>(source.size());
    const Eigen::MatrixXd L = wedge_with_symplectic_matrix(n, k, source, target);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L);
    svd.setThreshold(1e-10);
    return static_cast<int>(source.size()) - static_cast<int>(svd.rank());
}

std::vector<ConstantForm> primitive_basis(int n, int k) {
    const auto source = bidegree_monomials(n, k);
    const auto target = bidegree_monomials(n, k + 1);
    Eigen::MatrixXd K;
    if (target.empty()) {
        K = Eigen::MatrixXd::Identity(static_cast<long>(source.size()), static_cast<long>(source.size()));
    } else {
        const Eigen::MatrixXd L = wedge_with_symplectic_matrix(n, k, source, target);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
        lu.setThreshold(1e-10);
        K = lu.kernel();
        if (K.cols() > 0) {  // orthonormalize coefficient vectors
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
            K = qr.householderQ() * Eigen::MatrixXd::Identity(K.rows(), K.cols());
        }
    }
    std::vector<ConstantForm> out;
    for (long j = 0; j < K.cols(); ++j) {
        ConstantForm f(n);
        for (size_t i = 0; i < source.size(); ++i) {
            const double c = K(static_cast<long>(i), j);
            if (std::abs(c) > 1e-14) f.add_term(source[i], Complex(c, 0.0));
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace mavaltk::forms
