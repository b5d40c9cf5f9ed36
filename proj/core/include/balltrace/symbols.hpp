#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include "balltrace/common.hpp"
#include "balltrace/geometry.hpp"
#include "balltrace/multi_index.hpp"

namespace balltrace {

// Exponent pair of one monomial z^holo zbar^anti.
struct TermKey {
    MultiIndex holo, anti;
    friend bool operator<(const TermKey& a, const TermKey& b) {
        return std::tie(a.holo, a.anti) < std::tie(b.holo, b.anti);
    }
    friend bool operator==(const TermKey& a, const TermKey& b) {
        return a.holo == b.holo && a.anti == b.anti;
    }
};

// Coefficient field hooks; specialized for the exact-rational mode.
template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Complex> {
    static Complex conjugate(const Complex& c) { return std::conj(c); }
    static bool is_zero(const Complex& c) { return c == Complex(0.0); }
};

// Polynomial in z_1..z_n, zbar_1..zbar_n with coefficients in C. Values are
// immutable; every operation returns a new symbol. The double-complex
// instantiation is PolySymbol; an exact-rational instantiation backs golden
// tests (see rational.hpp).
template <class C>
class BasicPolySymbol {
public:
    explicit BasicPolySymbol(int n) : n_(check_dim(n)) {}

    static BasicPolySymbol from_terms(int n, std::map<TermKey, C> terms) {
        BasicPolySymbol s(n);
        for (auto& [key, c] : terms) {
            if (static_cast<int>(key.holo.size()) != n ||
                static_cast<int>(key.anti.size()) != n)
                throw std::invalid_argument("PolySymbol: term arity mismatch");
            if (!CoeffTraits<C>::is_zero(c)) s.terms_.emplace(key, c);
        }
        s.refresh_degrees();
        return s;
    }

    static BasicPolySymbol constant(int n, C c) {
        std::map<TermKey, C> t;
        t[TermKey{MultiIndex(n, 0), MultiIndex(n, 0)}] = c;
        return from_terms(n, std::move(t));
    }

    static BasicPolySymbol monomial(int n, MultiIndex holo, MultiIndex anti, C c) {
        std::map<TermKey, C> t;
        t[TermKey{std::move(holo), std::move(anti)}] = c;
        return from_terms(n, std::move(t));
    }

    // z_i and zbar_i, 0-based axis
    static BasicPolySymbol variable(int n, int i) {
        MultiIndex e(n, 0);
        e.at(static_cast<std::size_t>(i)) = 1;
        return monomial(n, e, MultiIndex(n, 0), C(1));
    }
    static BasicPolySymbol conj_variable(int n, int i) {
        MultiIndex e(n, 0);
        e.at(static_cast<std::size_t>(i)) = 1;
        return monomial(n, MultiIndex(n, 0), e, C(1));
    }

    int dim() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<TermKey, C>& terms() const { return terms_; }

    // max |holo| resp. max |anti| over stored terms; 0 for the zero symbol
    int holo_degree() const { return d_h_; }
    int anti_degree() const { return d_a_; }

    friend bool operator==(const BasicPolySymbol& a, const BasicPolySymbol& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

    friend BasicPolySymbol operator+(const BasicPolySymbol& a, const BasicPolySymbol& b) {
        require_same_dim(a, b);
        std::map<TermKey, C> t = a.terms_;
        for (const auto& [key, c] : b.terms_) accumulate(t, key, c);
        return from_terms(a.n_, std::move(t));
    }

    friend BasicPolySymbol operator-(const BasicPolySymbol& a, const BasicPolySymbol& b) {
        return a + (C(-1) * b);
    }

    friend BasicPolySymbol operator*(const C& c, const BasicPolySymbol& a) {
        std::map<TermKey, C> t;
        for (const auto& [key, v] : a.terms_) t[key] = c * v;
        return from_terms(a.n_, std::move(t));
    }

    friend BasicPolySymbol sym_mul(const BasicPolySymbol& a, const BasicPolySymbol& b) {
        require_same_dim(a, b);
        std::map<TermKey, C> t;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                accumulate(t, TermKey{mi_add(ka.holo, kb.holo), mi_add(ka.anti, kb.anti)},
                           ca * cb);
        return from_terms(a.n_, std::move(t));
    }

    friend BasicPolySymbol sym_conj(const BasicPolySymbol& a) {
        std::map<TermKey, C> t;
        for (const auto& [key, c] : a.terms_)
            t[TermKey{key.anti, key.holo}] = CoeffTraits<C>::conjugate(c);
        return from_terms(a.n_, std::move(t));
    }

    // formal Wirtinger derivatives on monomials, 0-based axis
    friend BasicPolySymbol d_holo(const BasicPolySymbol& a, int i) {
        return a.derive(i, /*anti=*/false);
    }
    friend BasicPolySymbol d_anti(const BasicPolySymbol& a, int i) {
        return a.derive(i, /*anti=*/true);
    }

    // R = sum_i z_i d_i scales each term by |holo|; Rbar by |anti|
    friend BasicPolySymbol radial_R(const BasicPolySymbol& a) {
        std::map<TermKey, C> t;
        for (const auto& [key, c] : a.terms_) {
            const int d = degree(key.holo);
            if (d != 0) t[key] = C(d) * c;
        }
        return from_terms(a.n_, std::move(t));
    }
    friend BasicPolySymbol radial_Rbar(const BasicPolySymbol& a) {
        std::map<TermKey, C> t;
        for (const auto& [key, c] : a.terms_) {
            const int d = degree(key.anti);
            if (d != 0) t[key] = C(d) * c;
        }
        return from_terms(a.n_, std::move(t));
    }

private:
    static int check_dim(int n) {
        if (n < 1) throw std::invalid_argument("PolySymbol: dimension must be positive");
        return n;
    }
    static void require_same_dim(const BasicPolySymbol& a, const BasicPolySymbol& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("PolySymbol: dimension mismatch");
    }
    static void accumulate(std::map<TermKey, C>& t, const TermKey& key, const C& c) {
        auto it = t.find(key);
        if (it == t.end()) {
            t.emplace(key, c);
        } else {
            it->second = it->second + c;
            if (CoeffTraits<C>::is_zero(it->second)) t.erase(it);
        }
    }

    BasicPolySymbol derive(int i, bool anti) const {
        if (i < 0 || i >= n_) throw std::invalid_argument("PolySymbol: axis out of range");
        std::map<TermKey, C> t;
        for (const auto& [key, c] : terms_) {
            const MultiIndex& e = anti ? key.anti : key.holo;
            const int k = e[static_cast<std::size_t>(i)];
            if (k == 0) continue;
            TermKey down = key;
            (anti ? down.anti : down.holo)[static_cast<std::size_t>(i)] = k - 1;
            accumulate(t, down, C(k) * c);
        }
        return from_terms(n_, std::move(t));
    }

    void refresh_degrees() {
        d_h_ = d_a_ = 0;
        for (const auto& [key, c] : terms_) {
            d_h_ = std::max(d_h_, degree(key.holo));
            d_a_ = std::max(d_a_, degree(key.anti));
        }
    }

    int n_;
    std::map<TermKey, C> terms_;
    int d_h_ = 0, d_a_ = 0;
};

using PolySymbol = BasicPolySymbol<Complex>;

// (1 - |z|^2)^m expanded binomially.
template <class C>
BasicPolySymbol<C> defect_power_as(int n, int m) {
    if (m < 0) throw std::invalid_argument("defect_power: negative exponent");
    BasicPolySymbol<C> norm_sq(n);
    for (int i = 0; i < n; ++i) {
        MultiIndex e(n, 0);
        e[static_cast<std::size_t>(i)] = 1;
        norm_sq = norm_sq + BasicPolySymbol<C>::monomial(n, e, e, C(1));
    }
    BasicPolySymbol<C> acc = BasicPolySymbol<C>::constant(n, C(1));
    BasicPolySymbol<C> pw = acc;
    long long binom = 1;
    for (int k = 0; k <= m; ++k) {
        if (k > 0) {
            binom = binom * (m - k + 1) / k;
            pw = sym_mul(pw, norm_sq);
        }
        const C sign = (k % 2 == 0) ? C(1) : C(-1);
        if (k == 0)
            acc = BasicPolySymbol<C>::constant(n, C(1));
        else
            acc = acc + (sign * C(binom)) * pw;
    }
    return acc;
}

inline PolySymbol defect_power(int n, int m) { return defect_power_as<Complex>(n, m); }

// 4 d dbar, the planar Laplacian on polynomials of one complex variable.
PolySymbol laplacian_disk(const PolySymbol& a);

Complex eval(const PolySymbol& a, const Point& z);

// Polynomial in z, zbar, w, wbar backing the two-point bilinear calculus.
struct BiTermKey {
    MultiIndex zh, za, wh, wa;
    friend bool operator<(const BiTermKey& a, const BiTermKey& b) {
        return std::tie(a.zh, a.za, a.wh, a.wa) < std::tie(b.zh, b.za, b.wh, b.wa);
    }
    friend bool operator==(const BiTermKey& a, const BiTermKey& b) {
        return a.zh == b.zh && a.za == b.za && a.wh == b.wh && a.wa == b.wa;
    }
};

class BiSymbol {
public:
    explicit BiSymbol(int n);
    static BiSymbol from_terms(int n, std::map<BiTermKey, Complex> terms);
    // f(z) g(w)
    static BiSymbol outer(const PolySymbol& f, const PolySymbol& g);
    // 1 - <z,w> = 1 - sum_k z_k wbar_k
    static BiSymbol one_minus_inner(int n);

    int dim() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<BiTermKey, Complex>& terms() const { return terms_; }

    friend BiSymbol operator+(const BiSymbol& a, const BiSymbol& b);
    friend BiSymbol operator*(const Complex& c, const BiSymbol& a);
    friend BiSymbol bi_mul(const BiSymbol& a, const BiSymbol& b);
    // Wirtinger derivatives in the z resp. w group, 0-based axis
    friend BiSymbol bi_d_z_holo(const BiSymbol& a, int i);
    friend BiSymbol bi_d_w_anti(const BiSymbol& a, int j);

private:
    int n_;
    std::map<BiTermKey, Complex> terms_;
};

// substitute w -> z, wbar -> zbar and collect
PolySymbol restrict_diagonal(const BiSymbol& a);

Complex bi_eval(const BiSymbol& a, const Point& z, const Point& w);

// Text form. Grammar: sum of products of factors; factors are complex number
// literals, z<k>, z<k>~ or conj(...), defect(<m>), parenthesized expressions,
// and integer powers with ^. print_symbol round-trips exactly through
// parse_symbol.
PolySymbol parse_symbol(const std::string& text, int n);
std::string print_symbol(const PolySymbol& a);

} // namespace balltrace
