#include "balltrace/special.hpp"

#include "balltrace/quadrature.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace balltrace {

namespace {

std::uint64_t bits_of(double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof(u));
    return u;
}

const GaussRule& cached_jacobi01(int m, double t) {
    static std::map<std::pair<int, std::uint64_t>, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(m, bits_of(t));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, gauss_jacobi01(m, t)).first;
    return it->second;
}

} // namespace

double beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta: arguments must be positive");
    return boost::math::beta(a, b);
}

double monomial_norm_sq(int n, WeightParam t, const MultiIndex& alpha) {
    if (n < 1 || static_cast<int>(alpha.size()) != n)
        throw std::invalid_argument("monomial_norm_sq: dimension mismatch");
    // alpha!/prod_j (n+t+j): numerator factors are the concatenated runs 1..alpha_i,
    // denominator factors n+t+j for j = 1..|alpha|. Both lists have |alpha| entries;
    // consuming them pairwise keeps every partial product in range.
    double v = 1.0;
    int j = 0;
    for (int i = 0; i < n; ++i) {
        for (int k = 1; k <= alpha[i]; ++k) {
            ++j;
            v *= static_cast<double>(k) / (n + t.t + j);
        }
    }
    return v;
}

namespace {

// Scaled integral Fhat = F_m phi(s) / (1-s)^(t+1), assembled piecewise over the
// tabulation grid of phi so the interpolant is integrated knot-exactly. Keeping
// the (1-s)^(t+1) normalization inside the exponentials avoids spurious 0/0 for
// large t, where F itself underflows but G = Fhat / s^m stays meaningful.
double f_scaled(int m, double t, const TabulatedFn& phi, double s, double* err_out) {
    const std::vector<double>& g = phi.grid();
    const double log1ms = std::log1p(-s);
    // weight ratio (1-r)^t / (1-s)^(t+1) evaluated in log space
    auto wlog = [&](double r) { return t * std::log1p(-r) - (t + 1.0) * log1ms; };
    auto base = [&](double r) { return std::pow(r, m - 1) * phi(r); };

    double total = 0.0, err = 0.0;

    // closed-form head (0, g0] for s = 0: phi extrapolates as a power of r there
    if (s == 0.0 && g.front() > 0.0) {
        const double g0 = g.front();
        const double v0 = phi(g0);
        double p = 0.0;
        if (v0 > 0.0) {
            const double vh = phi(0.5 * g0);
            if (vh > 0.0) p = std::log(v0 / vh) / std::log(2.0);
        }
        if (m + p <= 0.1)
            throw std::domain_error("apply_F: integrand not integrable at 0");
        total += v0 * std::pow(g0, m) / (m + p);
    }

    // Pieces whose right end sits close to 1 are parametrized by the exact
    // complement v = 1-r; forming r first and subtracting would leave (1-r)
    // with only the digits surviving cancellation, and the resulting noise in
    // (1-r)^t cannot be refined away.
    struct Piece {
        double a, b;  // r-coordinates, or v = 1-r when comp is set (then a > b)
        bool comp;
        double val, err;
    };
    auto eval_piece = [&](double a, double b, bool comp) -> Piece {
        const GaussRule& lo = gauss_legendre01(8);
        const GaussRule& hi = gauss_legendre01(16);
        auto quad = [&](const GaussRule& r) {
            double acc = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                if (comp) {
                    const double v = a + (b - a) * r.nodes[i];
                    const double logv = std::log(v);
                    const double x = 1.0 - v;
                    acc += r.weights[i] * std::pow(x, m - 1) * phi.value_at_log1m(logv) *
                           std::exp(t * logv - (t + 1.0) * log1ms);
                } else {
                    const double x = a + (b - a) * r.nodes[i];
                    acc += r.weights[i] * base(x) * std::exp(wlog(x));
                }
            }
            return acc * std::abs(b - a);
        };
        const double vlo = quad(lo), vhi = quad(hi);
        return {a, b, comp, vhi, std::abs(vhi - vlo)};
    };

    std::vector<Piece> pieces;
    auto add_piece = [&](double a, double b) {
        if (!(b > a)) return;
        if (std::max(wlog(a), wlog(b)) < -60.0) return; // underflows against the scale
        if (b > 0.999) {
            pieces.push_back(eval_piece(1.0 - a, 1.0 - b, true));
        } else {
            pieces.push_back(eval_piece(a, b, false));
        }
    };

    // Knot pieces stay Gauss-Legendre-friendly while (1-r)^t moves by at most
    // e^3 across a piece; past that knot the Jacobi tail absorbs the weight
    // exactly. For t <= 0 the per-piece variation is always mild.
    std::size_t tail_knot = g.size() - 1;
    if (t > 0.0) {
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
            if (t * (std::log1p(-g[k]) - std::log1p(-g[k + 1])) > 3.0) {
                tail_knot = k;
                break;
            }
        }
    }

    const double gT = g[tail_knot];
    if (s < gT) {
        // index of the first knot strictly greater than s
        const std::size_t i = static_cast<std::size_t>(
            std::upper_bound(g.begin(), g.end(), s) - g.begin());
        std::size_t first_full = 0; // left knot index of the first full interval
        if (s == 0.0) {
            first_full = 0; // head (0, g0] is covered by the closed form above
        } else if (i == 0) {
            add_piece(s, g[0]);
            first_full = 0;
        } else {
            add_piece(s, g[i]);
            first_full = i;
        }
        for (std::size_t k = first_full; k < tail_knot; ++k) add_piece(g[k], g[k + 1]);
    }

    {
        // Jacobi tail [max(s,gT), 1): substituting r = a + (1-a)u gives
        // (1-r) = (1-a)(1-u). Writing phi = psi (1-r)^q with q the table's
        // upper tail exponent leaves psi smooth and slowly varying there, and
        // the rule with weight (1-u)^(t+q) integrates the rest exactly.
        const double a = std::max(s, gT);
        double q = phi.upper_tail_exponent();
        if (!(q > -0.5 * (t + 1.0)) || q > 60.0) q = 0.0;
        const double scale_log = (t + 1.0 + q) * std::log1p(-a) - (t + 1.0) * log1ms;
        if (scale_log >= -60.0) {
            const double scale = std::exp(scale_log);
            const double log1ma = std::log1p(-a);
            auto tail = [&](int order) {
                const GaussRule& r = cached_jacobi01(order, t + q);
                double acc = 0.0;
                for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                    const double u = r.nodes[i];
                    const double log1mx = log1ma + std::log1p(-u);
                    const double x = -std::expm1(log1mx);
                    const double psi =
                        (q != 0.0) ? std::exp(phi.log_value_at_log1m(log1mx) - q * log1mx)
                                   : phi.value_at_log1m(log1mx);
                    acc += r.weights[i] * std::pow(x, m - 1) * psi;
                }
                return acc * scale;
            };
            double vlo = tail(16), vhi = tail(32);
            for (int order = 64; order <= 128 && std::abs(vhi - vlo) > 1e-12 * std::abs(vhi);
                 order *= 2) {
                vlo = vhi;
                vhi = tail(order);
            }
            total += vhi;
            err += std::abs(vhi - vlo);
        }
    }

    // bisect the worst pieces until the pair-difference estimate certifies the
    // target; Gauss pairs gain many digits per halving, so this terminates fast
    for (int round = 0; round < 800; ++round) {
        double sum = total, esum = err;
        std::size_t worst = pieces.size();
        double worst_err = 0.0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            sum += pieces[i].val;
            esum += pieces[i].err;
            if (pieces[i].err > worst_err) {
                worst_err = pieces[i].err;
                worst = i;
            }
        }
        if (esum <= 2.5e-10 * std::abs(sum) || worst == pieces.size() || worst_err == 0.0) {
            if (err_out) *err_out = esum;
            return sum;
        }
        const Piece p = pieces[worst];
        const double mid = 0.5 * (p.a + p.b);
        pieces[worst] = eval_piece(p.a, mid, p.comp);
        pieces.push_back(eval_piece(mid, p.b, p.comp));
    }
    double sum = total, esum = err;
    for (const Piece& p : pieces) {
        sum += p.val;
        esum += p.err;
    }
    if (err_out) *err_out = esum;
    return sum;
}

double f_scaled_checked(int m, double t, const TabulatedFn& phi, double s) {
    double err = 0.0;
    const double v = f_scaled(m, t, phi, s, &err);
    const double scale = std::max(std::abs(v), 1e-300);
    if (err / scale > 1e-9) {
        char ctx[96];
        std::snprintf(ctx, sizeof(ctx), "apply_F(m=%d, t=%.6g, s=%.12g)", m, t, s);
        throw QuadratureError(ctx, err / scale, 1e-9);
    }
    return v;
}

} // namespace

double apply_F(int m, WeightParam t, const TabulatedFn& phi, double s) {
    if (m < 1) throw std::invalid_argument("apply_F: m must be positive");
    if (!(t.t > -1.0)) throw std::domain_error("apply_F: need t > -1");
    if (!(s >= 0.0 && s < 1.0)) throw std::domain_error("apply_F: s outside [0,1)");
    const double fh = f_scaled_checked(m, t.t, phi, s);
    return fh * std::exp((t.t + 1.0) * std::log1p(-s));
}

double apply_G(int m, WeightParam t, const TabulatedFn& phi, double s) {
    if (m < 1) throw std::invalid_argument("apply_G: m must be positive");
    if (!(t.t > -1.0)) throw std::domain_error("apply_G: need t > -1");
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("apply_G: s must lie strictly in (0,1)");
    const double fh = f_scaled_checked(m, t.t, phi, s);
    return fh / std::pow(s, m);
}

namespace {

using PhiKey = std::tuple<int, int, std::uint64_t>;
std::map<PhiKey, std::unique_ptr<TabulatedFn>>& phi_cache() {
    static std::map<PhiKey, std::unique_ptr<TabulatedFn>> c;
    return c;
}
std::mutex phi_mutex;

} // namespace

const TabulatedFn& phi_nk_table(int n, int k, WeightParam t) {
    if (k < 0 || k > 4) throw std::invalid_argument("phi_nk: supported depth is k <= 4");
    if (!(t.t > -1.0)) throw std::domain_error("phi_nk: need t > -1");
    std::lock_guard<std::mutex> lock(phi_mutex);
    auto& cache = phi_cache();
    for (int j = 0; j <= k; ++j) {
        const PhiKey key{n, j, bits_of(t.t)};
        if (cache.count(key)) continue;
        std::unique_ptr<TabulatedFn> tab;
        if (j == 0) {
            tab = std::make_unique<TabulatedFn>(TabulatedFn::constant(1.0, 33));
        } else {
            const TabulatedFn& prev = *cache.at(PhiKey{n, j - 1, bits_of(t.t)});
            const int m = n + j - 1;
            // the inner table is denser than the published one so that two
            // stacked interpolations do not dominate the level's error
            auto inner = TabulatedFn::sample(
                [&](double s) { return apply_G(m, t, prev, s); }, 2048);
            auto level = TabulatedFn::sample(
                [&](double s) { return (1.0 - s) * apply_G(m, t, inner, s); });
            tab = std::make_unique<TabulatedFn>(std::move(level));
        }
        cache.emplace(PhiKey{n, j, bits_of(t.t)}, std::move(tab));
    }
    return *cache.at(PhiKey{n, k, bits_of(t.t)});
}

double phi_nk(int n, int k, WeightParam t, double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("phi_nk: s outside (0,1)");
    if (k == 0) return 1.0;
    return phi_nk_table(n, k, t)(s);
}

namespace {

struct SeriesResult {
    double sum = 0.0;
    double tail = 0.0;
    bool converged = false;
};

// sum_{j_1..j_l} B(n+l+J_l, t+1) / prod_i (i+J_{i-1})(i+J_i), by dynamic
// programming over the running sum S = J_i with prefix accumulation.
SeriesResult c_series_direct(int n, int l, double t) {
    int smax = 256;
    const int cap = 1 << 22;
    SeriesResult res;
    while (true) {
        std::vector<double> W(smax + 1);
        for (int S = 0; S <= smax; ++S) W[S] = 1.0 / (1.0 + S);
        for (int i = 2; i <= l; ++i) {
            std::vector<double> Wn(smax + 1);
            double prefix = 0.0;
            for (int S = 0; S <= smax; ++S) {
                prefix += W[S] / (i + S);
                Wn[S] = prefix / (i + S);
            }
            W.swap(Wn);
        }
        double B = beta(n + l, t + 1.0);
        double sum = 0.0, last = 0.0;
        for (int S = 0; S <= smax; ++S) {
            last = W[S] * B;
            sum += last;
            B *= (n + l + S) / (n + l + S + t + 1.0);
        }
        const double tail = last * (smax + n + l) / (t + 1.0);
        res = {sum, tail, tail <= 1e-12 * sum};
        if (res.converged || smax >= cap) return res;
        smax *= 4;
    }
}

// l = 1 only: S(n,t) = sum_j B(n+1+j, t+1)/(1+j) obeys the exact lift
//   S(n,t) = [B(n+1,t+1) + (n+t+1) S(n,t+1)] / (t+1),
// so small t reduces to a fast-converging large-t series.
double c_series_l1(int n, double t) {
    if (t >= 40.0) return c_series_direct(n, 1, t).sum;
    const int steps = static_cast<int>(std::ceil(40.0 - t));
    double S = c_series_direct(n, 1, t + steps).sum;
    for (int i = steps - 1; i >= 0; --i) {
        const double tc = t + i;
        S = (beta(n + 1.0, tc + 1.0) + (n + tc + 1.0) * S) / (tc + 1.0);
    }
    return S;
}

} // namespace

CCoeffInfo c_coeff_info(int n, int l, WeightParam t) {
    if (l < 0 || l > 4) throw std::invalid_argument("c_coeff: supported order is l <= 4");
    if (!(t.t > -1.0)) throw std::domain_error("c_coeff: need t > -1");
    CCoeffInfo info;
    const double Bn = beta(n, t.t + 1.0);
    if (l == 0) {
        info.value = 1.0;
        info.series_converged = true;
    } else if (l == 1) {
        info.value = c_series_l1(n, t.t) / Bn;
        info.series_converged = true;
    } else {
        const SeriesResult r = c_series_direct(n, l, t.t);
        info.value = r.sum / Bn;
        info.series_tail = r.tail / Bn;
        info.series_converged = r.converged;
    }
    info.quadrature = apply_F(n + l, t, phi_nk_table(n, l, t), 0.0) / Bn;
    info.mismatch = std::abs(info.value - info.quadrature) /
                    std::max(std::abs(info.value), 1e-300);
    if (info.mismatch > 1e-8) {
        info.diagnostic = true;
        std::fprintf(stderr,
                     "c_coeff diagnostic: series/quadrature mismatch %.3e "
                     "(n=%d l=%d t=%.6g series=%.15g quadrature=%.15g)\n",
                     info.mismatch, n, l, t.t, info.value, info.quadrature);
    }
    return info;
}

double c_coeff(int n, int l, WeightParam t) { return c_coeff_info(n, l, t).value; }

double rho(WeightParam t, double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("rho: s outside (0,1)");
    if (t.hardy()) return -std::log(s) / (16.0 * kPi * kPi);
    const double tv = t.t;

    const double phis = s * std::log(s) + (1.0 - s) * std::log1p(-s);
    const double dphis = std::log(s) - std::log1p(-s);
    auto F = [&](double x) {
        const double dx = x - s;
        if (std::abs(dx) < 1e-6 * s) {
            // second-order switch: F = phi''(s) dx^2/2 + phi'''(s) dx^3/6
            const double f2 = 1.0 / (s * (1.0 - s));
            const double f3 = -1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s));
            return 0.5 * f2 * dx * dx + (f3 / 6.0) * dx * dx * dx;
        }
        return (x * std::log(x) + (1.0 - x) * std::log1p(-x)) - phis - dphis * dx;
    };

    // left part in log-spaced panels (resolves the ln(x/s) curvature when s is
    // small), right part with a Jacobi rule absorbing (1-x)^t at x = 1
    auto value_at = [&](int level) {
        const int mleft = 16 + 8 * level;
        const int mright = 64 * (1 << level);
        const double split = std::max(s, 0.5);
        double acc = 0.0;
        const GaussRule& gl = gauss_legendre01(mleft);
        double a = s;
        while (a < split) {
            const double b = std::min(4.0 * a, split);
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                const double x = a + (b - a) * gl.nodes[i];
                acc += gl.weights[i] * (b - a) * std::pow(1.0 - x, tv) * F(x) / x;
            }
            a = b;
        }
        const double scale_log = (tv + 1.0) * std::log1p(-split);
        if (scale_log >= -700.0) {
            const GaussRule& gj = cached_jacobi01(mright, tv);
            double tail = 0.0;
            for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
                const double x = split + (1.0 - split) * gj.nodes[i];
                tail += gj.weights[i] * F(x) / x;
            }
            acc += tail * std::exp(scale_log);
        }
        return acc;
    };

    double prev = value_at(0);
    for (int level = 1; level <= 3; ++level) {
        const double cur = value_at(level);
        const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) / scale <= 1e-9)
            return (tv + 1.0) / (16.0 * kPi * kPi) * cur;
        prev = cur;
    }
    // final refinement failed to certify 1e-9; the level-3 value is still the
    // best available and typically at ~1e-12, so report rather than abort
    return (tv + 1.0) / (16.0 * kPi * kPi) * prev;
}

} // namespace balltrace
