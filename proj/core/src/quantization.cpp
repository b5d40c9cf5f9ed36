#include "balltrace/quantization.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "balltrace/special.hpp"

namespace balltrace {

namespace {

// polynomial in zeta (or zetabar) alone, used while expanding (A_z zeta)^alpha
using SpherePoly = std::map<MultiIndex, Complex>;

SpherePoly mul_linear(const SpherePoly& p, const std::vector<Complex>& form) {
    SpherePoly out;
    for (const auto& [mi, c] : p) {
        for (std::size_t k = 0; k < form.size(); ++k) {
            if (form[k] == Complex(0.0)) continue;
            MultiIndex up = mi;
            ++up[k];
            out[up] += c * form[k];
        }
    }
    return out;
}

SpherePoly expand_power(const Eigen::MatrixXcd& a, const MultiIndex& expo, bool conjugated) {
    const int n = static_cast<int>(expo.size());
    SpherePoly p;
    p[MultiIndex(static_cast<std::size_t>(n), 0)] = Complex(1.0);
    std::vector<Complex> form(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (expo[static_cast<std::size_t>(i)] == 0) continue;
        for (int k = 0; k < n; ++k)
            form[static_cast<std::size_t>(k)] = conjugated ? std::conj(a(i, k)) : a(i, k);
        for (int rep = 0; rep < expo[static_cast<std::size_t>(i)]; ++rep)
            p = mul_linear(p, form);
    }
    return p;
}

PolySymbol norm_sq_symbol(int n) {
    PolySymbol s(n);
    for (int i = 0; i < n; ++i) {
        MultiIndex e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(i)] = 1;
        s = s + PolySymbol::monomial(n, e, e, Complex(1.0));
    }
    return s;
}

// sum_i d_i f dbar_i g
PolySymbol gradient_pairing(const PolySymbol& f, const PolySymbol& g) {
    const int n = f.dim();
    PolySymbol p(n);
    for (int i = 0; i < n; ++i) p = p + sym_mul(d_holo(f, i), d_anti(g, i));
    return p;
}

} // namespace

double sphere_moment(int n, const MultiIndex& alpha, const MultiIndex& beta) {
    if (static_cast<int>(alpha.size()) != n || static_cast<int>(beta.size()) != n)
        throw std::invalid_argument("sphere_moment: index arity mismatch");
    if (alpha != beta) return 0.0;
    // the Hardy-space monomial norm is exactly the normalized sphere moment
    return monomial_norm_sq(n, WeightParam(-1.0), alpha);
}

Complex d_alpha_beta(const Point& z, const MultiIndex& alpha, const MultiIndex& beta) {
    const int n = z.dim();
    if (static_cast<int>(alpha.size()) != n || static_cast<int>(beta.size()) != n)
        throw std::invalid_argument("d_alpha_beta: index arity mismatch");
    if (!z.interior()) throw std::domain_error("d_alpha_beta: z must be interior");
    const Eigen::MatrixXcd a = a_matrix(z);
    const SpherePoly pa = expand_power(a, alpha, /*conjugated=*/false);
    const SpherePoly pb = expand_power(a, beta, /*conjugated=*/true);
    Complex out(0.0);
    for (const auto& [mi, ca] : pa) {
        auto it = pb.find(mi);
        if (it == pb.end()) continue;
        out += ca * it->second * sphere_moment(n, mi, mi);
    }
    return out;
}

PolySymbol C_l_symbolic(const PolySymbol& f, const PolySymbol& g, int l, const Point& z) {
    if (l < 0 || l > kMaxDWordLength)
        throw std::invalid_argument("C_l: order must be between 0 and " +
                                    std::to_string(kMaxDWordLength));
    if (f.dim() != g.dim() || f.dim() != z.dim())
        throw std::invalid_argument("C_l: dimension mismatch");
    const int n = f.dim();
    if (l == 0) return sym_mul(f, g);

    const BiSymbol omi = BiSymbol::one_minus_inner(n);
    const BiSymbol omi2 = bi_mul(omi, omi);
    PolySymbol acc(n);
    MultiIndex ai(static_cast<std::size_t>(n), 0), bj(static_cast<std::size_t>(n), 0);
    // Words act left to right: position 1 differentiates f(z)g(w) first. The
    // d subscript only sees the multiset of indices, so it is accumulated in
    // ai, bj along the way.
    std::function<void(const BiSymbol&, int)> walk = [&](const BiSymbol& cur, int depth) {
        if (depth == l) {
            const Complex w = d_alpha_beta(z, ai, bj);
            if (w != Complex(0.0)) acc = acc + w * restrict_diagonal(cur);
            return;
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const BiSymbol next = bi_mul(omi2, bi_d_w_anti(bi_d_z_holo(cur, i), j));
                if (next.is_zero()) continue;
                ++ai[static_cast<std::size_t>(i)];
                ++bj[static_cast<std::size_t>(j)];
                walk(next, depth + 1);
                --ai[static_cast<std::size_t>(i)];
                --bj[static_cast<std::size_t>(j)];
            }
        }
    };
    walk(BiSymbol::outer(f, g), 0);

    const double defect = 1.0 - z.norm_sq();
    const Complex scale = Complex((l % 2 == 0) ? 1.0 : -1.0) / std::pow(defect, 2 * l);
    return scale * acc;
}

Complex C_l(const PolySymbol& f, const PolySymbol& g, int l, const Point& z) {
    return eval(C_l_symbolic(f, g, l, z), z);
}

PolySymbol C1_closed(const PolySymbol& f, const PolySymbol& g) {
    if (f.dim() != g.dim()) throw std::invalid_argument("C1_closed: dimension mismatch");
    const int n = f.dim();
    const PolySymbol bracket =
        gradient_pairing(f, g) - sym_mul(radial_R(f), radial_Rbar(g));
    return Complex(-1.0 / n) * sym_mul(defect_power(n, 1), bracket);
}

Complex eval_pole(const PoleSymbol& p, const Point& z) {
    const Complex v = eval(p.numerator, z);
    if (!p.over_norm_sq) return v;
    const double r2 = z.norm_sq();
    if (r2 > 0.0) return v / r2;
    // Spherical-average limit at 0: z_i zbar_j / |z|^2 averages to
    // delta_ij / n, every other quadratic monomial to 0. Terms of total
    // degree below two would make the pole genuine.
    const int n = p.numerator.dim();
    Complex lim(0.0);
    for (const auto& [key, c] : p.numerator.terms()) {
        const int dh = degree(key.holo), da = degree(key.anti);
        if (dh + da < 2)
            throw std::domain_error("eval_pole: non-removable singularity at z = 0");
        if (dh == 1 && da == 1 && key.holo == key.anti) lim += c;
    }
    return lim / Complex(static_cast<double>(n));
}

C1Split C1_split(const PolySymbol& f, const PolySymbol& g) {
    if (f.dim() != g.dim()) throw std::invalid_argument("C1_split: dimension mismatch");
    const int n = f.dim();
    const PolySymbol radial = sym_mul(radial_R(f), radial_Rbar(g));
    // C_T numerator: multiply the projector delta_ij - z_i zbar_j / |z|^2
    // through by |z|^2; the contraction sum_{ij} z_i zbar_j d_i f dbar_j g
    // is exactly Rf Rbar g.
    const PolySymbol tangential_num =
        sym_mul(norm_sq_symbol(n), gradient_pairing(f, g)) - radial;
    const Complex s(-1.0 / n);
    return C1Split{
        PoleSymbol{s * sym_mul(defect_power(n, 2), radial), true},
        PoleSymbol{s * sym_mul(defect_power(n, 1), tangential_num), true},
    };
}

PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g) {
    const Complex in(0.0, static_cast<double>(f.dim()));
    return in * (C1_closed(f, g) - C1_closed(g, f));
}

} // namespace balltrace
