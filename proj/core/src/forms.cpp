#include "balltrace/forms.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <vector>

#include "balltrace/quadrature.hpp"
#include "balltrace/quantization.hpp"
#include "balltrace/special.hpp"

namespace balltrace {

namespace {

double factorial(int k) {
    double v = 1.0;
    for (int r = 2; r <= k; ++r) v *= r;
    return v;
}

// exterior algebra over the 2n generators dz_1, dzbar_1, ..., dz_n, dzbar_n;
// bit 2i is dz_{i+1}, bit 2i+1 is dzbar_{i+1}, masks ordered by increasing bit
using WedgeForm = std::map<unsigned, PolySymbol>;

int wedge_sign(unsigned ma, unsigned mb) {
    int inv = 0;
    for (int j = 0; mb >> j != 0u; ++j)
        if ((mb >> j) & 1u) inv += std::popcount(ma >> (j + 1));
    return (inv & 1) ? -1 : 1;
}

WedgeForm wedge_mul(const WedgeForm& a, const WedgeForm& b) {
    WedgeForm out;
    for (const auto& [ma, pa] : a) {
        for (const auto& [mb, pb] : b) {
            if ((ma & mb) != 0u) continue;
            PolySymbol prod = sym_mul(pa, pb);
            if (wedge_sign(ma, mb) < 0) prod = Complex(-1.0) * prod;
            auto it = out.find(ma | mb);
            if (it == out.end())
                out.emplace(ma | mb, std::move(prod));
            else
                it->second = it->second + prod;
        }
    }
    return out;
}

enum class Part { full, holo, anti };

WedgeForm one_form(const PolySymbol& f, Part part) {
    const int n = f.dim();
    WedgeForm w;
    for (int i = 0; i < n; ++i) {
        if (part != Part::anti) {
            PolySymbol p = d_holo(f, i);
            if (!p.is_zero()) w.emplace(1u << (2 * i), std::move(p));
        }
        if (part != Part::holo) {
            PolySymbol p = d_anti(f, i);
            if (!p.is_zero()) w.emplace(1u << (2 * i + 1), std::move(p));
        }
    }
    return w;
}

// coefficient of the orientation form dz_1 ^ dzbar_1 ^ ... ^ dz_n ^ dzbar_n,
// which equals (-2i)^n dm
PolySymbol top_coefficient(const WedgeForm& w, int n) {
    const unsigned full = (1u << (2 * n)) - 1u;
    auto it = w.find(full);
    return it == w.end() ? PolySymbol::constant(n, Complex(0.0)) : it->second;
}

int common_dimension(const std::vector<PolySymbol>& fs) {
    const int n = fs.front().dim();
    for (const auto& f : fs)
        if (f.dim() != n) throw std::invalid_argument("mixed symbol dimensions");
    return n;
}

// ball_moment(1, {p}, {p}, 2) without the MultiIndex plumbing
double disk_moment2(double p) {
    return 2.0 * M_PI / ((p + 1.0) * (p + 2.0) * (p + 3.0));
}

double binom_small(int h, int i) {
    double v = 1.0;
    for (int r = 1; r <= i; ++r) v *= static_cast<double>(h - i + r) / r;
    return v;
}

// binom(m + h + 1, h + 1), growing polynomially in m
double binom_shifted(double m, int h) {
    double v = 1.0;
    for (int q = 1; q <= h + 1; ++q) v *= (m + q) / q;
    return v;
}

struct RhoGrid {
    std::vector<double> s, w, rho;
};

// composite Gauss-Legendre panels on s = |zeta|^2, dyadically refined toward
// both endpoints (rho_{-1} has a log singularity at 0; s^m peaks at 1)
RhoGrid build_rho_grid(WeightParam t, int order) {
    std::vector<std::pair<double, double>> panels;
    for (int j = 45; j >= 1; --j) panels.emplace_back(std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j));
    for (int j = 1; j <= 30; ++j)
        panels.emplace_back(1.0 - std::ldexp(1.0, -j), 1.0 - std::ldexp(1.0, -j - 1));
    const GaussRule& rule = gauss_legendre01(std::max(8, order));
    RhoGrid g;
    for (const auto& [a, b] : panels) {
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = a + (b - a) * rule.nodes[i];
            g.s.push_back(s);
            g.w.push_back((b - a) * rule.weights[i]);
            g.rho.push_back(rho(t, s));
        }
    }
    return g;
}

struct SymbolTerm {
    Complex c;
    int h = 0, a = 0;
};

std::vector<SymbolTerm> disk_terms(const PolySymbol& u) {
    std::vector<SymbolTerm> out;
    for (const auto& [key, c] : u.terms()) out.push_back({c, key.holo[0], key.anti[0]});
    return out;
}

// angular reduction of int rho_t(|zeta|^2) phi_z(zeta)^h conj(phi_z(zeta))^a
// (1-|z|^2)^2 / |1 - conj(z) zeta|^4 dm(zeta) paired against z^{hf} conj(z)^{af}:
// expanding (z-zeta)^h (1-conj(z) zeta)^{-h-2} and its conjugate in powers of
// zeta leaves one exact disk moment per matched frequency m
Complex mobius_pair_sum(const RhoGrid& grid, const std::vector<SymbolTerm>& tf,
                        const std::vector<SymbolTerm>& tg, double tolerance,
                        double* achieved) {
    std::vector<double> spow(grid.s.size(), 1.0);
    Complex total(0.0);
    double tail = 0.0;
    int quiet = 0;
    std::size_t first = 0;
    const int m_max = 400000;
    for (int m = 0; m <= m_max; ++m) {
        double rm = 0.0;
        // s is ascending, so powers underflow from the left end of the grid
        while (first < grid.s.size() && spow[first] < 1e-300) ++first;
        for (std::size_t i = first; i < grid.s.size(); ++i) {
            rm += grid.w[i] * grid.rho[i] * spow[i];
            spow[i] *= grid.s[i];
        }
        rm *= M_PI;

        Complex cm(0.0);
        for (const auto& F : tf) {
            for (const auto& G : tg) {
                if (F.h + G.h != F.a + G.a) continue;
                double k = 0.0;
                for (int i = 0; i <= std::min(G.h, m); ++i) {
                    for (int j = 0; j <= std::min(G.a, m); ++j) {
                        const double p = F.h + G.h - i + (m - j);
                        const double sign = ((i + j) & 1) ? -1.0 : 1.0;
                        k += sign * binom_small(G.h, i) * binom_small(G.a, j) *
                             binom_shifted(static_cast<double>(m - i), G.h) *
                             binom_shifted(static_cast<double>(m - j), G.a) * disk_moment2(p);
                    }
                }
                cm += F.c * G.c * k;
            }
        }
        total += rm * cm;

        const double inc = std::abs(rm * cm);
        if (m >= 24) {
            // shells decay like m^{-(t+4)}; bound the tail by inc * m
            tail = inc * m;
            if (tail < tolerance / 4.0) {
                if (++quiet >= 3) break;
            } else {
                quiet = 0;
            }
        }
        if (m == m_max) throw QuadratureError("disk rho series", tail, tolerance);
    }
    if (achieved != nullptr) *achieved = tail;
    return total;
}

double clamp_interp(const RhoGrid& grid, double s) {
    if (s <= grid.s.front()) return grid.rho.front();
    if (s >= grid.s.back()) return grid.rho.back();
    const auto it = std::lower_bound(grid.s.begin(), grid.s.end(), s);
    const std::size_t hi = static_cast<std::size_t>(it - grid.s.begin());
    const double s0 = grid.s[hi - 1], s1 = grid.s[hi];
    const double u = (s - s0) / (s1 - s0);
    return (1.0 - u) * grid.rho[hi - 1] + u * grid.rho[hi];
}

Complex direct_pair_integral(const RhoGrid& grid, const PolySymbol& lf, const PolySymbol& lg,
                             int radial, int angular) {
    const GaussRule& rule = gauss_legendre01(radial);
    struct Node {
        Complex z;
        Complex val;
        double w;
    };
    auto sample = [&](const PolySymbol& u, double shift) {
        std::vector<Node> nodes;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double r = std::sqrt(rule.nodes[i]);
            for (int j = 0; j < angular; ++j) {
                const Complex z = std::polar(r, 2.0 * M_PI * (j + shift) / angular);
                nodes.push_back({z, eval(u, Point{z}), M_PI * rule.weights[i] / angular});
            }
        }
        return nodes;
    };
    // the half-step stagger keeps the grids off the rho singularity at z = w
    const auto zf = sample(lf, 0.0);
    const auto zg = sample(lg, 0.5);
    Complex acc(0.0);
    for (const auto& a : zf) {
        for (const auto& b : zg) {
            const Complex phi = (a.z - b.z) / (1.0 - std::conj(a.z) * b.z);
            acc += a.w * b.w * clamp_interp(grid, std::norm(phi)) * a.val * b.val;
        }
    }
    return acc;
}

} // namespace

void validate(const QuadratureSpec& spec) {
    if (spec.radial_order < 4 || spec.angular_order < 4)
        throw ConfigError("quadrature orders must be at least 4");
    if (!(spec.tolerance > 0.0)) throw ConfigError("quadrature tolerance must be positive");
}

double ball_moment(int n, const MultiIndex& alpha, const MultiIndex& beta, double s) {
    if (n < 1) throw std::invalid_argument("ball_moment: dimension must be positive");
    if (alpha.size() != static_cast<std::size_t>(n) || beta.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("ball_moment: index arity mismatch");
    if (!(s > -1.0)) throw std::invalid_argument("ball_moment: requires s > -1");
    if (alpha != beta) return 0.0;
    double v = std::pow(M_PI, n);
    int j = 0;
    while (j < n) v /= (s + ++j);
    for (const int aq : alpha)
        for (int r = 1; r <= aq; ++r) v *= r / (s + ++j);
    return v;
}

Complex weighted_poly_integral(const PolySymbol& u, double s) {
    Complex acc(0.0);
    for (const auto& [key, c] : u.terms()) acc += c * ball_moment(u.dim(), key.holo, key.anti, s);
    return acc;
}

PolySymbol defect_quotient(const PolySymbol& u, int k) {
    if (k < 0) throw std::invalid_argument("defect_quotient: negative power");
    const int n = u.dim();
    std::map<TermKey, Complex> nsq_terms;
    for (int i = 0; i < n; ++i) {
        MultiIndex e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(i)] = 1;
        nsq_terms[TermKey{e, e}] = Complex(1.0);
    }
    const PolySymbol nsq = PolySymbol::from_terms(n, std::move(nsq_terms));

    PolySymbol cur = u;
    for (int round = 0; round < k; ++round) {
        if (cur.is_zero()) return cur;
        int max_deg = 0;
        double scale = 0.0;
        for (const auto& [key, c] : cur.terms()) {
            max_deg = std::max(max_deg, degree(key.holo) + degree(key.anti));
            scale = std::max(scale, std::abs(c));
        }
        // solve q (1 - |z|^2) = cur degree by degree: q_d = cur_d + (q |z|^2)_d
        std::vector<std::map<TermKey, Complex>> by_deg(static_cast<std::size_t>(max_deg) + 1);
        for (const auto& [key, c] : cur.terms())
            by_deg[static_cast<std::size_t>(degree(key.holo) + degree(key.anti))][key] += c;
        std::vector<std::map<TermKey, Complex>> q_deg(static_cast<std::size_t>(max_deg) + 1);
        for (int d = 0; d <= max_deg; ++d) {
            auto& qd = q_deg[static_cast<std::size_t>(d)];
            qd = by_deg[static_cast<std::size_t>(d)];
            if (d >= 2) {
                for (const auto& [key, c] : q_deg[static_cast<std::size_t>(d - 2)]) {
                    for (int i = 0; i < n; ++i) {
                        MultiIndex h = key.holo, a = key.anti;
                        ++h[static_cast<std::size_t>(i)];
                        ++a[static_cast<std::size_t>(i)];
                        qd[TermKey{std::move(h), std::move(a)}] += c;
                    }
                }
            }
        }
        std::map<TermKey, Complex> q_terms;
        for (auto& level : q_deg)
            for (auto& [key, c] : level)
                if (std::abs(c) > 1e-14 * std::max(1.0, scale)) q_terms[key] += c;
        PolySymbol q = PolySymbol::from_terms(n, std::move(q_terms));

        const PolySymbol residual = cur + sym_mul(q, nsq) - q;
        double worst = 0.0;
        for (const auto& [key, c] : residual.terms()) worst = std::max(worst, std::abs(c));
        if (worst > 1e-9 * std::max(1.0, scale))
            throw std::runtime_error("defect_quotient: polynomial is not divisible by 1-|z|^2");
        cur = std::move(q);
    }
    return cur;
}

Complex helton_howe_integral(const std::vector<PolySymbol>& fs) {
    if (fs.empty()) throw std::invalid_argument("helton_howe_integral: no symbols");
    const int n = common_dimension(fs);
    if (fs.size() != static_cast<std::size_t>(2 * n))
        throw std::invalid_argument("helton_howe_integral: expected 2n symbols in dimension n");
    WedgeForm w{{0u, PolySymbol::constant(n, Complex(1.0))}};
    for (const auto& f : fs) w = wedge_mul(w, one_form(f, Part::full));
    // n!/(2 pi i)^n (-2i)^n = n! (-1/pi)^n
    return factorial(n) * std::pow(-1.0 / M_PI, n) * weighted_poly_integral(top_coefficient(w, n), 0.0);
}

Complex mixed_wedge_integral(const std::vector<PolySymbol>& fs, const std::vector<PolySymbol>& gs) {
    if (fs.empty() || fs.size() != gs.size())
        throw std::invalid_argument("mixed_wedge_integral: need equally many f and g symbols");
    const int n = common_dimension(fs);
    if (common_dimension(gs) != n || fs.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("mixed_wedge_integral: expected n pairs in dimension n");
    WedgeForm w{{0u, PolySymbol::constant(n, Complex(1.0))}};
    for (int j = 0; j < n; ++j) {
        w = wedge_mul(w, one_form(fs[static_cast<std::size_t>(j)], Part::holo));
        w = wedge_mul(w, one_form(gs[static_cast<std::size_t>(j)], Part::anti));
    }
    return std::pow(-1.0 / M_PI, n) * weighted_poly_integral(top_coefficient(w, n), 0.0);
}

DiskRhs disk_semicommutator_rhs(const PolySymbol& f, const PolySymbol& g, WeightParam t,
                                const QuadratureSpec& spec) {
    validate(spec);
    if (f.dim() != 1 || g.dim() != 1)
        throw std::invalid_argument("disk_semicommutator_rhs: disk symbols only");
    DiskRhs out;
    out.term1 = mixed_wedge_integral({f}, {g});
    const PolySymbol lf = laplacian_disk(f);
    const PolySymbol lg = laplacian_disk(g);
    if (lf.is_zero() || lg.is_zero()) return out;

    const RhoGrid grid = build_rho_grid(t, spec.radial_order);
    if (spec.mobius) {
        double achieved = 0.0;
        out.term2 = mobius_pair_sum(grid, disk_terms(lf), disk_terms(lg), spec.tolerance, &achieved);
        out.term2_error = achieved + 1e-12 * std::abs(out.term2);
    } else {
        const int radial = std::max(8, 2 * spec.radial_order);
        const Complex coarse = direct_pair_integral(grid, lf, lg, radial, spec.angular_order);
        const Complex fine = direct_pair_integral(grid, lf, lg, radial + 8, spec.angular_order + 16);
        out.term2 = fine;
        out.term2_error = std::abs(fine - coarse);
    }
    return out;
}

double cc_limit_integral(const std::vector<PolySymbol>& fs, const std::vector<PolySymbol>& gs,
                         int p, int n) {
    if (fs.size() != gs.size() || fs.size() != static_cast<std::size_t>(p))
        throw std::invalid_argument("cc_limit_integral: need p symbol pairs");
    if (p < n + 1) throw std::invalid_argument("cc_limit_integral: requires p >= n+1");
    if (common_dimension(fs) != n || common_dimension(gs) != n)
        throw std::invalid_argument("cc_limit_integral: dimension mismatch");
    PolySymbol prod = PolySymbol::constant(n, Complex(1.0));
    for (std::size_t j = 0; j < fs.size(); ++j) {
        const PolySymbol c1 = C1_closed(fs[j], gs[j]);
        if (c1.is_zero()) return 0.0;
        prod = sym_mul(prod, c1);
    }
    const PolySymbol q = defect_quotient(prod, n + 1);
    return (std::pow(static_cast<double>(n), p) / std::pow(M_PI, n) *
            weighted_poly_integral(q, 0.0))
        .real();
}

double hankel_limit_integral(const PolySymbol& g, int p, int n) {
    if (g.dim() != n) throw std::invalid_argument("hankel_limit_integral: dimension mismatch");
    if (p < n + 1) throw std::invalid_argument("hankel_limit_integral: requires p >= n+1");
    PolySymbol base = PolySymbol::constant(n, Complex(0.0));
    for (int i = 0; i < n; ++i) {
        const PolySymbol di = d_anti(g, i);
        base = base + sym_mul(di, sym_conj(di));
    }
    const PolySymbol rb = radial_Rbar(g);
    base = base - sym_mul(rb, sym_conj(rb));
    if (base.is_zero()) return 0.0;
    PolySymbol pw = PolySymbol::constant(n, Complex(1.0));
    for (int r = 0; r < p; ++r) pw = sym_mul(pw, base);
    pw = sym_mul(pw, defect_power(n, p - n - 1));
    return (weighted_poly_integral(pw, 0.0) / std::pow(M_PI, n)).real();
}

} // namespace balltrace
