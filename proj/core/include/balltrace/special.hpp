#pragma once

#include "balltrace/common.hpp"
#include "balltrace/multi_index.hpp"
#include "balltrace/tabulated.hpp"

namespace balltrace {

// Euler Beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), a,b > 0.
double beta(double a, double b);

// Squared monomial norm on the weighted Bergman space over B_n (t > -1) or the
// Hardy space on the sphere (t = -1):
//   ||z^alpha||^2 = alpha! / prod_{j=1}^{|alpha|} (n+t+j).
// Evaluated as an interleaved rational product; no Gamma calls, no overflow.
double monomial_norm_sq(int n, WeightParam t, const MultiIndex& alpha);

// F_m phi(s) = int_s^1 r^(m-1) phi(r) (1-r)^t dr, for t > -1, s in [0,1).
// Knot-aligned composite quadrature over the tabulation grid of phi; the
// (1-r)^t endpoint factor is absorbed by a Jacobi-weighted tail rule, and a
// potential power singularity of phi at 0 (s = 0 case) is integrated in closed
// form on the sub-grid head using the tail exponent of the tabulation.
double apply_F(int m, WeightParam t, const TabulatedFn& phi, double s);

// G_m phi(s) = F_m phi(s) / (s^m (1-s)^(t+1)); s strictly inside (0,1).
double apply_G(int m, WeightParam t, const TabulatedFn& phi, double s);

// Ladder of radial functions:
//   Phi_{n,0} = 1,   Phi_{n,k+1}(s) = (1-s) * (G_{n+k}(G_{n+k} Phi_{n,k}))(s),
// where the inner and outer G are the same operator applied twice (composition).
// Supported depth k <= 4; each level is tabulated once per (n,k,t) and reused.
double phi_nk(int n, int k, WeightParam t, double s);
const TabulatedFn& phi_nk_table(int n, int k, WeightParam t);

struct CCoeffInfo {
    double value = 0.0;          // adopted value (series route)
    double series_tail = 0.0;    // estimated neglected tail of the series
    bool series_converged = true;
    double quadrature = 0.0;     // independent F_{n+l} Phi_{n,l}(0)/B(n,t+1) route
    double mismatch = 0.0;       // |series - quadrature| / |series|
    bool diagnostic = false;     // mismatch exceeded 1e-8
};

// Quantization coefficient c_{l,t} = F_{n+l} Phi_{n,l}(0) / B(n,t+1), l <= 4.
// Primary route: the exact nested series
//   F_{n+l} Phi_{n,l}(0) = sum_{j_1..j_l >= 0} B(n+l+J_l, t+1)
//                          / prod_{i=1}^{l} (i+J_{i-1})(i+J_i),  J_i = j_1+..+j_i,
// truncated when the estimated tail falls below 1e-12 of the partial sum.
// The tail decays like S^-(t+2); for l = 1 an exact lift in t makes every t > -1
// reachable, for l >= 2 and t close to -1 the criterion may be unattainable and
// the result is flagged instead of silently accepted. A quadrature cross-check
// runs alongside; relative mismatch > 1e-8 raises a stderr diagnostic.
double c_coeff(int n, int l, WeightParam t);
CCoeffInfo c_coeff_info(int n, int l, WeightParam t);

// Trace kernel of the semi-commutator formula on the disk:
//   rho_t(s) = (t+1)/(16 pi^2) int_s^1 (1-x)^t x^-1 F(s,x) dx,  t > -1,
//   F(s,x)   = -[x ln(s/x) + (1-x) ln((1-s)/(1-x))]
//            = phi(x) - phi(s) - phi'(s)(x-s),  phi(y) = y ln y + (1-y) ln(1-y),
// and rho_{-1}(s) = -ln(s)/(16 pi^2) in the Hardy case. Strictly positive on (0,1).
double rho(WeightParam t, double s);

} // namespace balltrace
