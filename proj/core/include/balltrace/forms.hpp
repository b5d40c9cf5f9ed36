#pragma once

#include <utility>
#include <vector>

#include "balltrace/common.hpp"
#include "balltrace/multi_index.hpp"
#include "balltrace/symbols.hpp"

namespace balltrace {

struct QuadratureSpec {
    int radial_order = 12;    // Gauss nodes per radial panel / axis
    int angular_order = 32;   // uniform angular nodes per complex axis
    bool mobius = true;       // route double integrals through w = phi_z(zeta)
    double tolerance = 1e-8;
};

void validate(const QuadratureSpec& spec);

// int_{B_n} z^alpha conj(z)^beta (1-|z|^2)^s dm
// = delta_{alpha,beta} pi^n alpha! / prod_{j=1}^{n+|alpha|} (s+j)
double ball_moment(int n, const MultiIndex& alpha, const MultiIndex& beta, double s);

Complex weighted_poly_integral(const PolySymbol& u, double s);

// exact quotient u / (1-|z|^2)^k; throws std::runtime_error when u is not
// divisible (nonzero remainder)
PolySymbol defect_quotient(const PolySymbol& u, int k);

// n!/(2 pi i)^n int_{B_n} df_1 ^ df_2 ^ ... ^ df_{2n}
Complex helton_howe_integral(const std::vector<PolySymbol>& fs);

// 1/(2 pi i)^n int_{B_n} del f_1 ^ dbar g_1 ^ ... ^ del f_n ^ dbar g_n
Complex mixed_wedge_integral(const std::vector<PolySymbol>& fs,
                             const std::vector<PolySymbol>& gs);

struct DiskRhs {
    Complex term1{0.0, 0.0};       // boundary wedge term
    Complex term2{0.0, 0.0};       // rho_t double integral
    double term2_error = 0.0;      // estimated quadrature/truncation error
    Complex total() const { return term1 + term2; }
};

// right-hand side of the disk semi-commutator trace identity:
// 1/(2 pi i) int del f ^ dbar g  +  int_{D^2} rho_t(|phi_z(w)|^2)
// (Lap f)(z) (Lap g)(w) dm(z) dm(w)
DiskRhs disk_semicommutator_rhs(const PolySymbol& f, const PolySymbol& g,
                                WeightParam t, const QuadratureSpec& spec = {});

// n^p / pi^n int_{B_n} prod_j C_1(f_j, g_j) (1-|z|^2)^{-(n+1)} dm
double cc_limit_integral(const std::vector<PolySymbol>& fs,
                         const std::vector<PolySymbol>& gs, int p, int n);

// 1/pi^n int_{B_n} (|dbar g|^2 - |Rbar g|^2)^p (1-|z|^2)^{p-n-1} dm
double hankel_limit_integral(const PolySymbol& g, int p, int n);

} // namespace balltrace
