#include "balltrace/symbols.hpp"

#include <algorithm>

namespace balltrace {

std::vector<MultiIndex> enumerate_multi_indices(int n, int N) {
    if (n < 1 || N < 0) throw std::invalid_argument("enumerate_multi_indices: bad arguments");
    std::vector<MultiIndex> out;
    out.reserve(multi_index_count(n, N));
    MultiIndex cur(static_cast<std::size_t>(n), 0);
    // lexicographic enumeration of each degree shell d = 0..N
    for (int d = 0; d <= N; ++d) {
        auto rec = [&](auto&& self, int pos, int rem) -> void {
            if (pos == n - 1) {
                cur[static_cast<std::size_t>(pos)] = rem;
                out.push_back(cur);
                return;
            }
            for (int k = rem; k >= 0; --k) {
                cur[static_cast<std::size_t>(pos)] = k;
                self(self, pos + 1, rem - k);
            }
        };
        rec(rec, 0, d);
    }
    // lexicographic within a shell means descending leading entries; reorder
    // each shell ascending to match graded_lex_less
    std::sort(out.begin(), out.end(), graded_lex_less);
    return out;
}

PolySymbol laplacian_disk(const PolySymbol& a) {
    if (a.dim() != 1) throw std::invalid_argument("laplacian_disk: requires n = 1");
    return Complex(4.0) * d_anti(d_holo(a, 0), 0);
}

Complex eval(const PolySymbol& a, const Point& z) {
    if (z.dim() != a.dim()) throw std::invalid_argument("eval: dimension mismatch");
    Complex acc = 0.0;
    for (const auto& [key, c] : a.terms()) {
        Complex m = c;
        for (int i = 0; i < a.dim(); ++i) {
            for (int k = 0; k < key.holo[static_cast<std::size_t>(i)]; ++k) m *= z[i];
            for (int k = 0; k < key.anti[static_cast<std::size_t>(i)]; ++k) m *= std::conj(z[i]);
        }
        acc += m;
    }
    return acc;
}

namespace {

void bi_accumulate(std::map<BiTermKey, Complex>& t, const BiTermKey& key, Complex c) {
    auto it = t.find(key);
    if (it == t.end()) {
        t.emplace(key, c);
    } else {
        it->second += c;
        if (it->second == Complex(0.0)) t.erase(it);
    }
}

} // namespace

BiSymbol::BiSymbol(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("BiSymbol: dimension must be positive");
}

BiSymbol BiSymbol::from_terms(int n, std::map<BiTermKey, Complex> terms) {
    BiSymbol s(n);
    for (auto& [key, c] : terms) {
        if (static_cast<int>(key.zh.size()) != n || static_cast<int>(key.za.size()) != n ||
            static_cast<int>(key.wh.size()) != n || static_cast<int>(key.wa.size()) != n)
            throw std::invalid_argument("BiSymbol: term arity mismatch");
        if (c != Complex(0.0)) s.terms_.emplace(key, c);
    }
    return s;
}

BiSymbol BiSymbol::outer(const PolySymbol& f, const PolySymbol& g) {
    if (f.dim() != g.dim()) throw std::invalid_argument("BiSymbol::outer: dimension mismatch");
    const int n = f.dim();
    std::map<BiTermKey, Complex> t;
    for (const auto& [kf, cf] : f.terms())
        for (const auto& [kg, cg] : g.terms())
            bi_accumulate(t, BiTermKey{kf.holo, kf.anti, kg.holo, kg.anti}, cf * cg);
    return from_terms(n, std::move(t));
}

BiSymbol BiSymbol::one_minus_inner(int n) {
    std::map<BiTermKey, Complex> t;
    const MultiIndex zero(static_cast<std::size_t>(n), 0);
    t[BiTermKey{zero, zero, zero, zero}] = 1.0;
    for (int k = 0; k < n; ++k) {
        MultiIndex e = zero;
        e[static_cast<std::size_t>(k)] = 1;
        t[BiTermKey{e, zero, zero, e}] = -1.0;
    }
    return from_terms(n, std::move(t));
}

BiSymbol operator+(const BiSymbol& a, const BiSymbol& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("BiSymbol: dimension mismatch");
    std::map<BiTermKey, Complex> t = a.terms_;
    for (const auto& [key, c] : b.terms_) bi_accumulate(t, key, c);
    return BiSymbol::from_terms(a.n_, std::move(t));
}

BiSymbol operator*(const Complex& c, const BiSymbol& a) {
    std::map<BiTermKey, Complex> t;
    for (const auto& [key, v] : a.terms_)
        if (c * v != Complex(0.0)) t[key] = c * v;
    return BiSymbol::from_terms(a.n_, std::move(t));
}

BiSymbol bi_mul(const BiSymbol& a, const BiSymbol& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("BiSymbol: dimension mismatch");
    std::map<BiTermKey, Complex> t;
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_)
            bi_accumulate(t,
                          BiTermKey{mi_add(ka.zh, kb.zh), mi_add(ka.za, kb.za),
                                    mi_add(ka.wh, kb.wh), mi_add(ka.wa, kb.wa)},
                          ca * cb);
    return BiSymbol::from_terms(a.n_, std::move(t));
}

namespace {

BiSymbol bi_derive(const BiSymbol& a, int axis, int select) {
    // select: 0 = z-holomorphic, 1 = w-antiholomorphic
    if (axis < 0 || axis >= a.dim()) throw std::invalid_argument("BiSymbol: axis out of range");
    std::map<BiTermKey, Complex> t;
    for (const auto& [key, c] : a.terms()) {
        BiTermKey down = key;
        MultiIndex& e = (select == 0) ? down.zh : down.wa;
        const int k = e[static_cast<std::size_t>(axis)];
        if (k == 0) continue;
        e[static_cast<std::size_t>(axis)] = k - 1;
        bi_accumulate(t, down, static_cast<double>(k) * c);
    }
    return BiSymbol::from_terms(a.dim(), std::move(t));
}

} // namespace

BiSymbol bi_d_z_holo(const BiSymbol& a, int i) { return bi_derive(a, i, 0); }
BiSymbol bi_d_w_anti(const BiSymbol& a, int j) { return bi_derive(a, j, 1); }

PolySymbol restrict_diagonal(const BiSymbol& a) {
    std::map<TermKey, Complex> t;
    for (const auto& [key, c] : a.terms()) {
        const TermKey diag{mi_add(key.zh, key.wh), mi_add(key.za, key.wa)};
        auto it = t.find(diag);
        if (it == t.end())
            t.emplace(diag, c);
        else
            it->second += c;
    }
    return PolySymbol::from_terms(a.dim(), std::move(t));
}

Complex bi_eval(const BiSymbol& a, const Point& z, const Point& w) {
    if (z.dim() != a.dim() || w.dim() != a.dim())
        throw std::invalid_argument("bi_eval: dimension mismatch");
    Complex acc = 0.0;
    for (const auto& [key, c] : a.terms()) {
        Complex m = c;
        for (int i = 0; i < a.dim(); ++i) {
            const auto si = static_cast<std::size_t>(i);
            for (int k = 0; k < key.zh[si]; ++k) m *= z[i];
            for (int k = 0; k < key.za[si]; ++k) m *= std::conj(z[i]);
            for (int k = 0; k < key.wh[si]; ++k) m *= w[i];
            for (int k = 0; k < key.wa[si]; ++k) m *= std::conj(w[i]);
        }
        acc += m;
    }
    return acc;
}

} // namespace balltrace
