#pragma once

#include <memory>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "balltrace/common.hpp"
#include "balltrace/multi_index.hpp"
#include "balltrace/symbols.hpp"

#include <unordered_map>

namespace balltrace {

// Monomial basis of polynomials of total degree <= N in graded-lex order,
// with the weighted norms ||z^alpha||_t^2 attached.
class BasisTruncation {
public:
    BasisTruncation(int n, WeightParam t, int N);

    int dim() const { return n_; }
    WeightParam weight() const { return t_; }
    int degree_cap() const { return cap_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const MultiIndex& index(std::size_t k) const { return indices_[k]; }
    double norm_sq(std::size_t k) const { return norms_sq_[k]; }
    double norm(std::size_t k) const { return norms_[k]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t position(const MultiIndex& alpha) const;

    // half-open index range of the degree-d shell
    std::size_t shell_begin(int d) const;
    std::size_t shell_end(int d) const;

private:
    int n_;
    WeightParam t_;
    int cap_;
    std::vector<MultiIndex> indices_;
    std::vector<double> norms_sq_, norms_;
    std::vector<std::size_t> shell_offsets_;
    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> positions_;
};

using BasisPtr = std::shared_ptr<const BasisTruncation>;

// Largest basis size the dense pipeline will allocate.
inline constexpr std::size_t kBasisBudget = 20000;

BasisPtr build_basis(int n, WeightParam t, int N);

// Dense matrix in the orthonormalized basis e_alpha = z^alpha/||z^alpha||.
// Entries in rows/columns of total degree <= exact_core_degree coincide with
// the infinite-dimensional operator; beyond that they may be truncation
// artifacts (products lose mass through the cut).
class OperatorMatrix {
public:
    OperatorMatrix(BasisPtr basis, Eigen::MatrixXcd m, int exact_core_degree);

    const BasisTruncation& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    int exact_core_degree() const { return core_degree_; }
    std::size_t core_size() const { return core_size_; }
    Eigen::MatrixXcd core_block() const {
        const auto s = static_cast<Eigen::Index>(core_size_);
        return m_.topLeftCorner(s, s);
    }

private:
    BasisPtr basis_;
    Eigen::MatrixXcd m_;
    int core_degree_;
    std::size_t core_size_;
};

// Compression entries <f e_alpha, e_beta>; exact at every degree of the basis.
Eigen::MatrixXcd toeplitz_matrix(const PolySymbol& f, const BasisTruncation& basis);
OperatorMatrix toeplitz(const PolySymbol& f, BasisPtr basis);

// Product T_{f_1} ... T_{f_m} assembled on a basis padded to
// N_core + sum_j holo_degree(f_j), so the returned core block carries the
// entries of the infinite-dimensional product.
OperatorMatrix compose_exact(const std::vector<PolySymbol>& fs, WeightParam t, int N_core);

// sigma_t(f,g) = T_f T_g - T_{fg}
OperatorMatrix semi_commutator(const PolySymbol& f, const PolySymbol& g, WeightParam t,
                               int N_core);

// H*H = -sigma_t(conj g, g); Hermitian PSD on the core block
OperatorMatrix hankel_gram(const PolySymbol& g, WeightParam t, int N_core);

// (sum sigma_i^p)^{1/p} resp. max sigma_i over the core block; finite-core
// lower bounds for the infinite operator
double schatten_norm(const OperatorMatrix& m, double p);
double operator_norm(const OperatorMatrix& m);

// R_{f,g,k+1} = T_f T_g - sum_{l=0}^k c_{l,t} T_{C_l(f,g)}; k <= 1 (higher
// coefficients are not polynomial symbols)
OperatorMatrix quantization_residual(const PolySymbol& f, const PolySymbol& g, int k,
                                     WeightParam t, int N_core);

// rows "row,col,re,im", full stored matrix
void write_csv(const OperatorMatrix& m, std::ostream& os);

} // namespace balltrace
