#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "balltrace/forms.hpp"
#include "balltrace/operators.hpp"
#include "balltrace/symbols.hpp"

namespace balltrace {

// Per-degree shell sums of exact diagonal entries with tail extrapolation.
// raw is the plain partial sum; extrapolated adds a tail estimate (rational
// extrapolation refined against a power-law fit). converged reports whether
// the power-law model survived a split-sample prediction check.
struct ShellSeries {
    std::vector<Complex> shells;
    std::vector<Complex> cumulative;
    Complex raw{0.0};
    Complex extrapolated{0.0};
    double error_estimate = 0.0;
    bool converged = false;
    double tail_exponent = 0.0;
    std::size_t fit_begin = 0;
    std::size_t fit_end = 0;
};

ShellSeries analyze_shells(std::vector<Complex> shells);

// Diagonal of the exact core block summed per total-degree shell.
ShellSeries shell_trace(const OperatorMatrix& m);

// Tr[T_{f_1}, ..., T_{f_2v}] via the pairing reduction
//   2^{-v} sum_{tau in S_2v} sgn(tau) [T_{f_tau1},T_{f_tau2}] ... ,
// i.e. a signed sum over ordered sequences of disjoint pairs, reusing the
// v(2v-1) pair commutators. Shell sums are accumulated error-free, so
// transposing two symbols flips every shell bitwise and a repeated symbol
// gives exact zeros.
ShellSeries antisym_trace(const std::vector<PolySymbol>& fs, WeightParam t, int N_core);

enum class Parity { odd, even };

// sum_{tau in S_v} sgn(tau) prod_i sigma_t(f_tau(i), g_i)   (odd)
// sum_{tau in S_v} sgn(tau) prod_i sigma_t(f_i, g_tau(i))   (even)
ShellSeries partial_antisym_trace(const std::vector<PolySymbol>& fs,
                                  const std::vector<PolySymbol>& gs, Parity parity,
                                  WeightParam t, int N_core);

// tau_t(f_0,...,f_2p-1) = Tr(sigma(f_0,f_1)...sigma(f_2p-2,f_2p-1))
//                       - Tr(sigma(f_1,f_2)...sigma(f_2p-1,f_0)).
// p = n is allowed; the series then reports divergent shells instead of
// refusing.
std::pair<ShellSeries, ShellSeries> connes_chern_series(const std::vector<PolySymbol>& fs,
                                                        int p, WeightParam t, int N_core);
double connes_chern(const std::vector<PolySymbol>& fs, int p, WeightParam t, int N_core);

// Tr T = integral of the Berezin density <T K_z, K_z> against the normalized
// weighted measure, evaluated by tensor Gauss-Jacobi (radial, after the
// simplex substitution) x uniform (angular) quadrature with orders raised to
// polynomial exactness. Cross-checks the core trace against the measure.
double berezin_trace(const OperatorMatrix& m, const QuadratureSpec& spec = {});

} // namespace balltrace
