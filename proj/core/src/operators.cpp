#include "balltrace/operators.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "balltrace/quantization.hpp"
#include "balltrace/special.hpp"

namespace balltrace {

namespace {

// ||z^{alpha+gamma}||^2 / ||z^alpha||^2, telescoping in the total degree
double norm_ratio(const MultiIndex& alpha, const MultiIndex& gamma, int n, double t) {
    double num = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        for (int k = 1; k <= gamma[i]; ++k) num *= alpha[i] + k;
    double den = 1.0;
    const int base = degree(alpha);
    for (int j = 1; j <= degree(gamma); ++j) den *= n + t + base + j;
    return num / den;
}

} // namespace

BasisTruncation::BasisTruncation(int n, WeightParam t, int N) : n_(n), t_(t), cap_(N) {
    if (N < 0) throw std::invalid_argument("BasisTruncation: negative degree cap");
    const std::size_t count = multi_index_count(n, N);
    if (count > kBasisBudget)
        throw BudgetError("basis size " + std::to_string(count) + " exceeds budget " +
                          std::to_string(kBasisBudget) + " (n=" + std::to_string(n) +
                          ", N=" + std::to_string(N) + ")");
    indices_ = enumerate_multi_indices(n, N);
    norms_sq_.reserve(indices_.size());
    norms_.reserve(indices_.size());
    positions_.reserve(indices_.size());
    shell_offsets_.assign(static_cast<std::size_t>(N) + 2, 0);
    int prev_deg = -1;
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        const double q = monomial_norm_sq(n, t, indices_[k]);
        norms_sq_.push_back(q);
        norms_.push_back(std::sqrt(q));
        positions_.emplace(indices_[k], k);
        const int d = degree(indices_[k]);
        while (prev_deg < d) shell_offsets_[static_cast<std::size_t>(++prev_deg)] = k;
    }
    shell_offsets_[static_cast<std::size_t>(N) + 1] = indices_.size();
}

std::size_t BasisTruncation::position(const MultiIndex& alpha) const {
    const auto it = positions_.find(alpha);
    return it == positions_.end() ? npos : it->second;
}

std::size_t BasisTruncation::shell_begin(int d) const {
    if (d < 0 || d > cap_) throw std::out_of_range("BasisTruncation: shell out of range");
    return shell_offsets_[static_cast<std::size_t>(d)];
}

std::size_t BasisTruncation::shell_end(int d) const {
    if (d < 0 || d > cap_) throw std::out_of_range("BasisTruncation: shell out of range");
    return shell_offsets_[static_cast<std::size_t>(d) + 1];
}

BasisPtr build_basis(int n, WeightParam t, int N) {
    return std::make_shared<const BasisTruncation>(n, t, N);
}

OperatorMatrix::OperatorMatrix(BasisPtr basis, Eigen::MatrixXcd m, int exact_core_degree)
    : basis_(std::move(basis)), m_(std::move(m)), core_degree_(exact_core_degree) {
    if (!basis_) throw std::invalid_argument("OperatorMatrix: null basis");
    if (m_.rows() != m_.cols() || static_cast<std::size_t>(m_.rows()) != basis_->size())
        throw std::invalid_argument("OperatorMatrix: shape does not match basis");
    if (core_degree_ < 0 || core_degree_ > basis_->degree_cap())
        throw std::invalid_argument("OperatorMatrix: core degree out of range");
    core_size_ = basis_->shell_end(core_degree_);
}

Eigen::MatrixXcd toeplitz_matrix(const PolySymbol& f, const BasisTruncation& basis) {
    if (f.dim() != basis.dim())
        throw std::invalid_argument("toeplitz: symbol dimension does not match basis");
    const int n = basis.dim();
    const double t = basis.weight().t;
    const auto size = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(size, size);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const MultiIndex& alpha = basis.index(a);
        for (const auto& [key, c] : f.terms()) {
            const MultiIndex beta = mi_sub_checked(mi_add(alpha, key.holo), key.anti);
            if (beta.empty()) continue;
            const std::size_t b = basis.position(beta);
            if (b == BasisTruncation::npos) continue;
            // <f e_alpha, e_beta> = c ||z^{alpha+gamma}||^2 / (||z^alpha|| ||z^beta||)
            m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) +=
                c * norm_ratio(alpha, key.holo, n, t) * basis.norm(a) / basis.norm(b);
        }
    }
    return m;
}

OperatorMatrix toeplitz(const PolySymbol& f, BasisPtr basis) {
    if (!basis) throw std::invalid_argument("toeplitz: null basis");
    Eigen::MatrixXcd m = toeplitz_matrix(f, *basis);
    const int core = basis->degree_cap();
    return OperatorMatrix(std::move(basis), std::move(m), core);
}

OperatorMatrix compose_exact(const std::vector<PolySymbol>& fs, WeightParam t, int N_core) {
    if (fs.empty()) throw std::invalid_argument("compose_exact: empty factor list");
    const int n = fs.front().dim();
    int pad = 0;
    for (const auto& f : fs) {
        if (f.dim() != n) throw std::invalid_argument("compose_exact: dimension mismatch");
        pad += f.holo_degree();
    }
    BasisPtr basis = build_basis(n, t, N_core + pad);
    Eigen::MatrixXcd acc = toeplitz_matrix(fs.front(), *basis);
    for (std::size_t j = 1; j < fs.size(); ++j) acc = acc * toeplitz_matrix(fs[j], *basis);
    return OperatorMatrix(std::move(basis), std::move(acc), N_core);
}

OperatorMatrix semi_commutator(const PolySymbol& f, const PolySymbol& g, WeightParam t,
                               int N_core) {
    if (f.dim() != g.dim()) throw std::invalid_argument("semi_commutator: dimension mismatch");
    BasisPtr basis = build_basis(f.dim(), t, N_core + f.holo_degree() + g.holo_degree());
    Eigen::MatrixXcd m = toeplitz_matrix(f, *basis) * toeplitz_matrix(g, *basis) -
                         toeplitz_matrix(sym_mul(f, g), *basis);
    return OperatorMatrix(std::move(basis), std::move(m), N_core);
}

OperatorMatrix hankel_gram(const PolySymbol& g, WeightParam t, int N_core) {
    const OperatorMatrix s = semi_commutator(sym_conj(g), g, t, N_core);
    return OperatorMatrix(s.basis_ptr(), Complex(-1.0) * s.matrix(), s.exact_core_degree());
}

namespace {

Eigen::VectorXd core_singular_values(const OperatorMatrix& m) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m.core_block());
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("schatten_norm: singular value decomposition failed");
    return svd.singularValues();
}

} // namespace

double schatten_norm(const OperatorMatrix& m, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("schatten_norm: requires p >= 1");
    const Eigen::VectorXd sv = core_singular_values(m);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) sum += std::pow(sv(i), p);
    return std::pow(sum, 1.0 / p);
}

double operator_norm(const OperatorMatrix& m) {
    const Eigen::VectorXd sv = core_singular_values(m);
    return sv.size() == 0 ? 0.0 : sv(0);
}

OperatorMatrix quantization_residual(const PolySymbol& f, const PolySymbol& g, int k,
                                     WeightParam t, int N_core) {
    if (k < 0 || k > 1)
        throw std::invalid_argument(
            "quantization_residual: expansion order must be 0 or 1 (higher coefficients "
            "are not polynomial symbols)");
    if (f.dim() != g.dim())
        throw std::invalid_argument("quantization_residual: dimension mismatch");
    OperatorMatrix r = semi_commutator(f, g, t, N_core);
    if (k == 0) return r;
    const double c1 = c_coeff(f.dim(), 1, t);
    Eigen::MatrixXcd m =
        r.matrix() - Complex(c1) * toeplitz_matrix(C1_closed(f, g), r.basis());
    return OperatorMatrix(r.basis_ptr(), std::move(m), r.exact_core_degree());
}

void write_csv(const OperatorMatrix& m, std::ostream& os) {
    os << "row,col,re,im\n";
    char buf[128];
    const auto& mat = m.matrix();
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g,%.17g\n",
                          static_cast<long long>(r), static_cast<long long>(c),
                          mat(r, c).real(), mat(r, c).imag());
            os << buf;
        }
    }
}

} // namespace balltrace
