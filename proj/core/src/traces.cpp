#include "balltrace/traces.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "balltrace/quadrature.hpp"

namespace balltrace {

namespace {

// error-free running sum kept as a nonoverlapping two-sum expansion; the
// rendered value is deterministic and odd-symmetric, so negated inputs give
// the bitwise-negated result and exact cancellations come out as true zeros
class ExactSum {
public:
    void add(double x) {
        std::size_t out = 0;
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            double y = comps_[i];
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) comps_[out++] = lo;
            x = hi;
        }
        comps_.resize(out);
        comps_.push_back(x);
    }
    double value() const {
        double s = 0.0;
        for (const double c : comps_) s += c;
        return s;
    }

private:
    std::vector<double> comps_;
};

struct ExactComplex {
    ExactSum re, im;
    void add(int sign, Complex v) {
        re.add(sign > 0 ? v.real() : -v.real());
        im.add(sign > 0 ? v.imag() : -v.imag());
    }
    Complex value() const { return Complex(re.value(), im.value()); }
};

bool coeff_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// strict total order on symbol content, used to canonicalize argument lists
bool symbol_less(const PolySymbol& a, const PolySymbol& b) {
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    auto ia = a.terms().begin();
    auto ib = b.terms().begin();
    const auto ea = a.terms().end();
    const auto eb = b.terms().end();
    for (; ia != ea && ib != eb; ++ia, ++ib) {
        if (ia->first < ib->first) return true;
        if (ib->first < ia->first) return false;
        if (coeff_less(ia->second, ib->second)) return true;
        if (coeff_less(ib->second, ia->second)) return false;
    }
    return ia == ea && ib != eb;
}

// sorts in place, returns the parity sign of the applied permutation; ties
// between equal symbols are stable, which can only misreport the sign when
// the alternating sum vanishes identically anyway
int canonical_sort(std::vector<PolySymbol>& fs) {
    const std::size_t m = fs.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return symbol_less(fs[i], fs[j]); });
    int sign = 1;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (idx[i] > idx[j]) sign = -sign;
    std::vector<PolySymbol> sorted;
    sorted.reserve(m);
    for (const std::size_t k : idx) sorted.push_back(fs[k]);
    fs = std::move(sorted);
    return sign;
}

void check_symbols(const std::vector<PolySymbol>& fs, const char* who) {
    if (fs.empty()) throw std::invalid_argument(std::string(who) + ": no symbols");
    for (const auto& f : fs)
        if (f.dim() != fs.front().dim())
            throw std::invalid_argument(std::string(who) + ": mixed symbol dimensions");
}

int total_holo_degree(const std::vector<PolySymbol>& fs) {
    int d = 0;
    for (const auto& f : fs) d += f.holo_degree();
    return d;
}

std::vector<Complex> shell_diag_sums(const Eigen::MatrixXcd& m, const BasisTruncation& basis,
                                     int core_degree) {
    std::vector<Complex> shells(static_cast<std::size_t>(core_degree) + 1);
    for (int d = 0; d <= core_degree; ++d) {
        Complex s(0.0);
        for (std::size_t k = basis.shell_begin(d); k < basis.shell_end(d); ++k)
            s += m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        shells[static_cast<std::size_t>(d)] = s;
    }
    return shells;
}

int permutation_sign(const std::vector<int>& w) {
    int s = 1;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j)
            if (w[i] > w[j]) s = -s;
    return s;
}

// sum_{d >= from} d^{-q} for q > 1, by direct summation plus an
// Euler-Maclaurin remainder
double hurwitz_tail(double q, double from) {
    double s = 0.0;
    double d = from;
    for (int i = 0; i < 2000; ++i, d += 1.0) s += std::pow(d, -q);
    s += std::pow(d, 1.0 - q) / (q - 1.0) + 0.5 * std::pow(d, -q) +
         q * std::pow(d, -q - 1.0) / 12.0;
    return s;
}

struct PowerFit {
    double c = 0.0;
    double q = 0.0;
    Complex unit{1.0, 0.0};
    bool ok = false;
};

// least squares for ln|s_d| = ln c - q ln d over nonzero shells in [b, e);
// unit is the mean phase of the window, the direction the tail is assumed
// to keep
PowerFit fit_power(const std::vector<Complex>& shells, std::size_t b, std::size_t e) {
    PowerFit f;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    Complex dir(0.0);
    for (std::size_t d = std::max<std::size_t>(b, 1); d < e; ++d) {
        const double a = std::abs(shells[d]);
        if (a == 0.0) continue;
        const double x = std::log(static_cast<double>(d));
        const double y = std::log(a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
        dir += shells[d] / a;
    }
    if (m < 3) return f;
    const double det = m * sxx - sx * sx;
    if (det <= 0.0) return f;
    const double slope = (m * sxy - sx * sy) / det;
    const double inter = (sy * sxx - sx * sxy) / det;
    if (std::abs(dir) == 0.0) return f;
    f.q = -slope;
    f.c = std::exp(inter);
    f.unit = dir / std::abs(dir);
    f.ok = std::isfinite(f.q) && std::isfinite(f.c);
    return f;
}

struct WynnOut {
    Complex value{0.0, 0.0};
    double gap = std::numeric_limits<double>::infinity();
    bool valid = false;
};

// Wynn's rho algorithm on the trailing partial sums with the degree as
// abscissa; exact for shell tails that are rational in the degree, which the
// diagonal laws of the semi-commutators are. Stalled runs (zero shells) are
// collapsed to their last index so parity-structured series still work.
WynnOut wynn_rho(const std::vector<Complex>& cum) {
    using CL = std::complex<long double>;
    WynnOut out;

    std::vector<long double> xs;
    std::vector<CL> ss;
    for (std::size_t k = 0; k < cum.size(); ++k) {
        const CL v(cum[k].real(), cum[k].imag());
        if (!ss.empty() && v == ss.back()) {
            xs.back() = static_cast<long double>(k);
            continue;
        }
        ss.push_back(v);
        xs.push_back(static_cast<long double>(k));
    }
    if (ss.size() > 20) {
        ss.erase(ss.begin(), ss.end() - 20);
        xs.erase(xs.begin(), xs.end() - 20);
    }
    const std::size_t W = ss.size();
    if (W < 3) return out;

    std::vector<CL> prev2 = ss;
    std::vector<Complex> tops;
    tops.push_back(Complex(static_cast<double>(ss.back().real()),
                           static_cast<double>(ss.back().imag())));

    std::vector<CL> prev1(W - 1);
    for (std::size_t k = 0; k + 1 < W; ++k)
        prev1[k] = (xs[k + 1] - xs[k]) / (prev2[k + 1] - prev2[k]);

    bool alive = true;
    for (std::size_t m = 2; m < W && alive; ++m) {
        std::vector<CL> cur(W - m);
        for (std::size_t k = 0; k < cur.size(); ++k) {
            const CL den = prev1[k + 1] - prev1[k];
            if (!(std::abs(den) > 0.0L)) {
                alive = false;
                break;
            }
            cur[k] = prev2[k + 1] + (xs[k + m] - xs[k]) / den;
            if (!std::isfinite(static_cast<double>(cur[k].real())) ||
                !std::isfinite(static_cast<double>(cur[k].imag()))) {
                alive = false;
                break;
            }
        }
        if (!alive) break;
        if (m % 2 == 0) {
            const Complex top(static_cast<double>(cur.back().real()),
                              static_cast<double>(cur.back().imag()));
            const double gap = std::abs(top - tops.back());
            tops.push_back(top);
            if (out.valid && gap > 10.0 * out.gap) break;
            if (gap < out.gap) {
                out.gap = gap;
                out.value = top;
                out.valid = true;
            }
        }
        prev2 = std::move(prev1);
        prev1 = std::move(cur);
    }
    return out;
}

// shared engine: signed products of precomputed factor matrices, shell sums
// accumulated error-free, then analyzed
class ShellAccumulator {
public:
    ShellAccumulator(const BasisTruncation& basis, int core_degree)
        : basis_(basis), core_degree_(core_degree),
          sums_(static_cast<std::size_t>(core_degree) + 1) {}

    void add_product_diag(int sign, const Eigen::MatrixXcd& m) {
        const auto shells = shell_diag_sums(m, basis_, core_degree_);
        for (std::size_t d = 0; d < shells.size(); ++d) sums_[d].add(sign, shells[d]);
    }

    ShellSeries finish(int overall_sign) const {
        std::vector<Complex> shells(sums_.size());
        for (std::size_t d = 0; d < sums_.size(); ++d) {
            const Complex v = sums_[d].value();
            shells[d] = overall_sign > 0 ? v : -v;
        }
        return analyze_shells(std::move(shells));
    }

private:
    const BasisTruncation& basis_;
    int core_degree_;
    std::vector<ExactComplex> sums_;
};

// depth-first over ordered sequences of disjoint index pairs, reusing prefix
// products; word collects (min,max) of each chosen pair in slot order
void pairing_dfs(const std::vector<std::vector<Eigen::MatrixXcd>>& pairC,
                 std::vector<bool>& used, std::vector<int>& word,
                 const Eigen::MatrixXcd* prefix, ShellAccumulator& acc) {
    const std::size_t m = used.size();
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (!used[i]) ++remaining;
    if (remaining == 0) {
        acc.add_product_diag(permutation_sign(word), *prefix);
        return;
    }
    for (std::size_t p = 0; p < m; ++p) {
        if (used[p]) continue;
        for (std::size_t q = p + 1; q < m; ++q) {
            if (used[q]) continue;
            used[p] = used[q] = true;
            word.push_back(static_cast<int>(p));
            word.push_back(static_cast<int>(q));
            if (prefix == nullptr) {
                pairing_dfs(pairC, used, word, &pairC[p][q], acc);
            } else {
                const Eigen::MatrixXcd next = *prefix * pairC[p][q];
                pairing_dfs(pairC, used, word, &next, acc);
            }
            word.pop_back();
            word.pop_back();
            used[p] = used[q] = false;
        }
    }
}

} // namespace

ShellSeries analyze_shells(std::vector<Complex> shells) {
    ShellSeries out;
    out.shells = std::move(shells);
    out.cumulative.resize(out.shells.size());
    Complex run(0.0);
    for (std::size_t i = 0; i < out.shells.size(); ++i) {
        run += out.shells[i];
        out.cumulative[i] = run;
    }
    if (out.shells.empty()) {
        out.converged = true;
        return out;
    }
    out.raw = out.cumulative.back();
    out.extrapolated = out.raw;
    out.error_estimate = std::abs(out.shells.back());

    double maxabs = 0.0;
    for (const auto& s : out.shells) maxabs = std::max(maxabs, std::abs(s));
    if (maxabs == 0.0) {
        out.converged = true;
        out.error_estimate = 0.0;
        return out;
    }

    const std::size_t size = out.shells.size();
    const std::size_t L = std::max<std::size_t>(4, size / 4);
    const std::size_t wb = size > L ? size - L : 0;
    out.fit_begin = wb;
    out.fit_end = size;

    bool tail_zero = true;
    for (std::size_t d = wb; d < size; ++d)
        if (std::abs(out.shells[d]) != 0.0) tail_zero = false;
    if (tail_zero) {
        // the series terminated: the sum is already exact
        out.converged = true;
        out.error_estimate = 0.0;
        return out;
    }

    if (size < 8) return out;
    const double last = std::abs(out.shells.back());

    bool power_ok = false;
    double tail_mag = 0.0;
    const PowerFit fit = fit_power(out.shells, wb, size);
    if (fit.ok) out.tail_exponent = fit.q;
    if (fit.ok && fit.q > 1.0) {
        tail_mag = fit.c * hurwitz_tail(fit.q, static_cast<double>(size));
        // split-sample check: fit the third quarter, predict the fourth
        const std::size_t b2 = size / 2;
        const std::size_t m2 = (3 * size) / 4;
        const PowerFit sf = fit_power(out.shells, b2, m2);
        if (sf.ok) {
            double pred_err = 0.0;
            for (std::size_t d = m2; d < size; ++d)
                pred_err += std::abs(
                    sf.unit * sf.c * std::pow(static_cast<double>(d), -sf.q) - out.shells[d]);
            power_ok = tail_mag > 0.0 && pred_err <= 0.1 * tail_mag;
        }
    }

    const WynnOut w = wynn_rho(out.cumulative);

    if (power_ok) {
        out.converged = true;
        if (w.valid && w.gap <= 0.5 * tail_mag) {
            // rational extrapolation is self-consistent well below the
            // modeled tail; prefer it, keep the error at the last increment
            out.extrapolated = w.value;
            out.error_estimate = std::max(last, w.gap);
        } else {
            out.extrapolated = out.raw + fit.unit * Complex(tail_mag);
            out.error_estimate = std::max(last, 0.1 * tail_mag);
        }
        return out;
    }

    // pre-asymptotic window (e.g. shell sums that only start decaying past
    // degree ~ t): rational extrapolation can still see through it, but only
    // accept it when a shortened window independently predicts the same limit
    if (size >= 12 && w.valid) {
        const WynnOut wp = wynn_rho(
            std::vector<Complex>(out.cumulative.begin(), out.cumulative.end() - 3));
        const double scale = std::max(1.0, std::abs(w.value));
        if (wp.valid && w.gap <= 1e-8 * scale &&
            std::abs(w.value - wp.value) <= 1e-7 * scale) {
            out.converged = true;
            out.extrapolated = w.value;
            out.error_estimate =
                std::max({last, w.gap, std::abs(w.value - wp.value)});
            return out;
        }
    }
    return out;
}

ShellSeries shell_trace(const OperatorMatrix& m) {
    return analyze_shells(
        shell_diag_sums(m.matrix(), m.basis(), m.exact_core_degree()));
}

ShellSeries antisym_trace(const std::vector<PolySymbol>& fs, WeightParam t, int N_core) {
    check_symbols(fs, "antisym_trace");
    if (fs.size() % 2 != 0)
        throw std::invalid_argument("antisym_trace: needs an even number of symbols");
    if (N_core < 0) throw std::invalid_argument("antisym_trace: negative core degree");

    std::vector<PolySymbol> sorted = fs;
    const int sign0 = canonical_sort(sorted);
    const std::size_t m = sorted.size();
    const int n = sorted.front().dim();
    const BasisPtr basis = build_basis(n, t, N_core + total_holo_degree(sorted));

    std::vector<Eigen::MatrixXcd> T(m);
    for (std::size_t i = 0; i < m; ++i) T[i] = toeplitz_matrix(sorted[i], *basis);

    std::vector<std::vector<Eigen::MatrixXcd>> pairC(m, std::vector<Eigen::MatrixXcd>(m));
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = p + 1; q < m; ++q) pairC[p][q] = T[p] * T[q] - T[q] * T[p];

    ShellAccumulator acc(*basis, N_core);
    std::vector<bool> used(m, false);
    std::vector<int> word;
    pairing_dfs(pairC, used, word, nullptr, acc);
    return acc.finish(sign0);
}

ShellSeries partial_antisym_trace(const std::vector<PolySymbol>& fs,
                                  const std::vector<PolySymbol>& gs, Parity parity,
                                  WeightParam t, int N_core) {
    check_symbols(fs, "partial_antisym_trace");
    check_symbols(gs, "partial_antisym_trace");
    if (fs.size() != gs.size())
        throw std::invalid_argument("partial_antisym_trace: count mismatch");
    if (fs.front().dim() != gs.front().dim())
        throw std::invalid_argument("partial_antisym_trace: mixed symbol dimensions");
    if (N_core < 0) throw std::invalid_argument("partial_antisym_trace: negative core degree");

    // odd parity permutes the f's, even parity permutes the g's; canonicalize
    // whichever list is permuted so transpositions reduce to a sign
    std::vector<PolySymbol> perm = parity == Parity::odd ? fs : gs;
    const std::vector<PolySymbol>& fixed = parity == Parity::odd ? gs : fs;
    const int sign0 = canonical_sort(perm);

    const std::size_t v = perm.size();
    const int n = perm.front().dim();
    const int pad = total_holo_degree(fs) + total_holo_degree(gs);
    const BasisPtr basis = build_basis(n, t, N_core + pad);

    // sigma[j][i]: the factor with permuted symbol j in fixed slot i
    std::vector<Eigen::MatrixXcd> Tp(v), Tx(v);
    for (std::size_t i = 0; i < v; ++i) {
        Tp[i] = toeplitz_matrix(perm[i], *basis);
        Tx[i] = toeplitz_matrix(fixed[i], *basis);
    }
    std::vector<std::vector<Eigen::MatrixXcd>> sigma(v, std::vector<Eigen::MatrixXcd>(v));
    for (std::size_t j = 0; j < v; ++j)
        for (std::size_t i = 0; i < v; ++i) {
            const PolySymbol prod = parity == Parity::odd ? sym_mul(perm[j], fixed[i])
                                                          : sym_mul(fixed[i], perm[j]);
            const Eigen::MatrixXcd Tprod = toeplitz_matrix(prod, *basis);
            sigma[j][i] = parity == Parity::odd ? Eigen::MatrixXcd(Tp[j] * Tx[i] - Tprod)
                                                : Eigen::MatrixXcd(Tx[i] * Tp[j] - Tprod);
        }

    ShellAccumulator acc(*basis, N_core);
    std::vector<int> tau(v);
    std::iota(tau.begin(), tau.end(), 0);
    do {
        Eigen::MatrixXcd prod = sigma[static_cast<std::size_t>(tau[0])][0];
        for (std::size_t i = 1; i < v; ++i)
            prod = prod * sigma[static_cast<std::size_t>(tau[i])][i];
        acc.add_product_diag(permutation_sign(tau), prod);
    } while (std::next_permutation(tau.begin(), tau.end()));
    return acc.finish(sign0);
}

std::pair<ShellSeries, ShellSeries> connes_chern_series(const std::vector<PolySymbol>& fs,
                                                        int p, WeightParam t, int N_core) {
    check_symbols(fs, "connes_chern");
    if (p < 1 || fs.size() != 2 * static_cast<std::size_t>(p))
        throw std::invalid_argument("connes_chern: needs exactly 2p symbols");
    const int n = fs.front().dim();
    if (p < n) throw std::invalid_argument("connes_chern: p below the symbol dimension");
    if (N_core < 0) throw std::invalid_argument("connes_chern: negative core degree");

    const BasisPtr basis = build_basis(n, t, N_core + total_holo_degree(fs));
    std::vector<Eigen::MatrixXcd> T(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) T[i] = toeplitz_matrix(fs[i], *basis);

    auto chain = [&](std::size_t start) {
        Eigen::MatrixXcd prod;
        for (int i = 0; i < p; ++i) {
            const std::size_t a = (start + 2 * static_cast<std::size_t>(i)) % fs.size();
            const std::size_t b = (a + 1) % fs.size();
            const Eigen::MatrixXcd sig =
                T[a] * T[b] - toeplitz_matrix(sym_mul(fs[a], fs[b]), *basis);
            prod = i == 0 ? sig : Eigen::MatrixXcd(prod * sig);
        }
        return analyze_shells(shell_diag_sums(prod, *basis, N_core));
    };
    return {chain(0), chain(1)};
}

double connes_chern(const std::vector<PolySymbol>& fs, int p, WeightParam t, int N_core) {
    const auto [a, b] = connes_chern_series(fs, p, t, N_core);
    return (a.extrapolated - b.extrapolated).real();
}

double berezin_trace(const OperatorMatrix& m, const QuadratureSpec& spec) {
    validate(spec);
    const BasisTruncation& basis = m.basis();
    const double t = basis.weight();
    if (!(t > -1.0))
        throw std::invalid_argument("berezin_trace: requires t > -1");
    const int n = basis.dim();
    const int D = m.exact_core_degree();
    const Eigen::MatrixXcd core = m.core_block();
    const std::size_t sz = m.core_size();

    // raise orders until the density polynomial is integrated exactly
    const int mr = std::max(spec.radial_order, D + 2);
    const int ma = std::max(spec.angular_order, 2 * D + 3);

    // simplex substitution u_j = v_j prod_{k<j} (1 - v_k) turns the radial
    // integral into a product of Jacobi weights (1 - v_k)^{t + n - 1 - k}
    std::vector<GaussRule> radial;
    radial.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) radial.push_back(gauss_jacobi01(mr, t + n - 1 - k));

    Eigen::VectorXcd E(static_cast<Eigen::Index>(sz));
    std::vector<Complex> z(static_cast<std::size_t>(n));
    std::vector<std::vector<Complex>> zpow(static_cast<std::size_t>(n));

    double den = 1.0;
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (const double w : radial[static_cast<std::size_t>(k)].weights) s += w;
        den *= s;
    }

    Complex num(0.0);
    std::vector<int> ridx(static_cast<std::size_t>(n), 0);
    std::vector<int> aidx(static_cast<std::size_t>(n), 0);
    const double dtheta = 2.0 * M_PI / ma;

    auto advance = [](std::vector<int>& idx, int cap) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (++idx[j] < cap) return true;
            idx[j] = 0;
        }
        return false;
    };

    do {
        double wr = 1.0;
        double defect = 1.0;
        std::vector<double> u(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const auto& rule = radial[static_cast<std::size_t>(k)];
            const double vk = rule.nodes[static_cast<std::size_t>(ridx[static_cast<std::size_t>(k)])];
            wr *= rule.weights[static_cast<std::size_t>(ridx[static_cast<std::size_t>(k)])];
            u[static_cast<std::size_t>(k)] = vk * defect;
            defect *= 1.0 - vk;
        }
        std::vector<int> a0(static_cast<std::size_t>(n), 0);
        std::copy(a0.begin(), a0.end(), aidx.begin());
        do {
            for (int j = 0; j < n; ++j) {
                const double r = std::sqrt(u[static_cast<std::size_t>(j)]);
                z[static_cast<std::size_t>(j)] =
                    std::polar(r, dtheta * aidx[static_cast<std::size_t>(j)]);
            }
            for (int j = 0; j < n; ++j) {
                auto& pw = zpow[static_cast<std::size_t>(j)];
                pw.assign(static_cast<std::size_t>(D) + 1, Complex(1.0));
                for (int e = 1; e <= D; ++e)
                    pw[static_cast<std::size_t>(e)] =
                        pw[static_cast<std::size_t>(e - 1)] * z[static_cast<std::size_t>(j)];
            }
            for (std::size_t a = 0; a < sz; ++a) {
                Complex mono(1.0);
                const MultiIndex& alpha = basis.index(a);
                for (int j = 0; j < n; ++j)
                    mono *= zpow[static_cast<std::size_t>(j)]
                                [static_cast<std::size_t>(alpha[static_cast<std::size_t>(j)])];
                E(static_cast<Eigen::Index>(a)) = mono / basis.norm(a);
            }
            const Complex density = (E.transpose() * (core * E.conjugate()))(0, 0);
            num += wr * density;
        } while (advance(aidx, ma));
    } while (advance(ridx, mr));

    const double angular_cells = std::pow(static_cast<double>(ma), n);
    return (num / (den * angular_cells)).real();
}

} // namespace balltrace
