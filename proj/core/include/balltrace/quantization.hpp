#pragma once

#include "balltrace/geometry.hpp"
#include "balltrace/symbols.hpp"

namespace balltrace {

// Longest supported word of D_{i,j} = (1 - <z,w>)^2 d/dz_i d/dwbar_j factors.
inline constexpr int kMaxDWordLength = 4;

// Normalized sphere moment:
//   int_{S_n} zeta^alpha conj(zeta)^beta dsigma = delta_{alpha,beta} (n-1)! alpha! / (n-1+|alpha|)!
double sphere_moment(int n, const MultiIndex& alpha, const MultiIndex& beta);

// d_{alpha,beta}(z) = int_{S_n} (A_z zeta)^alpha conj(A_z zeta)^beta dsigma,
// expanded termwise through sphere_moment. Requires z interior.
Complex d_alpha_beta(const Point& z, const MultiIndex& alpha, const MultiIndex& beta);

// Bilinear expansion coefficients
//   C_l(f,g)(z) = (-1)^l (1-|z|^2)^{-2l}
//                 sum_{i_1,j_1,...,i_l,j_l} d_{e_{i_1...i_l}, e_{j_1...j_l}}(z)
//                 [D_{i_l,j_l} ... D_{i_1,j_1} f(z)g(w)]|_{w=z}.
// C_l_symbolic returns the diagonal-restricted sum with the d weights and the
// prefactor folded in at the given z, so C_l(f,g,l,z) == eval(C_l_symbolic(...), z).
PolySymbol C_l_symbolic(const PolySymbol& f, const PolySymbol& g, int l, const Point& z);
Complex C_l(const PolySymbol& f, const PolySymbol& g, int l, const Point& z);

// Exact closed form of the first coefficient:
//   C_1(f,g) = -(1/n)(1-|z|^2)[ sum_i d_i f dbar_i g - Rf Rbar g ].
PolySymbol C1_closed(const PolySymbol& f, const PolySymbol& g);

// Polynomial numerator with an optional 1/|z|^2 pole. At z = 0 the value is
// the spherical average of the directional limits, which is also what the
// l = 1 D-word route assigns there.
struct PoleSymbol {
    PolySymbol numerator;
    bool over_norm_sq = false;
};
Complex eval_pole(const PoleSymbol& p, const Point& z);

// Complex-normal / complex-tangential split of C_1:
//   C_N = -(1/n)(1-|z|^2)^2 |z|^{-2} Rf Rbar g
//   C_T = -(1/n)(1-|z|^2) sum_{i,j} (delta_{ij} - z_i zbar_j / |z|^2) d_i f dbar_j g
// with C_N + C_T = C1_closed(f,g) away from z = 0.
struct C1Split {
    PoleSymbol normal;
    PoleSymbol tangential;
};
C1Split C1_split(const PolySymbol& f, const PolySymbol& g);

// {f,g} := i n (C_1(f,g) - C_1(g,f)), via the closed form.
PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g);

} // namespace balltrace
