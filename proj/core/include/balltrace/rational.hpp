#pragma once

#include <boost/rational.hpp>

#include "balltrace/symbols.hpp"

namespace balltrace {

using Rational = boost::rational<long long>;

// Gaussian rational a + b i, the exact coefficient field for golden tests.
struct RationalComplex {
    Rational re{0}, im{0};

    RationalComplex() = default;
    RationalComplex(long long v) : re(v) {}  // NOLINT: implicit by design
    RationalComplex(Rational r) : re(std::move(r)) {}
    RationalComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    friend RationalComplex operator+(const RationalComplex& a, const RationalComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend RationalComplex operator-(const RationalComplex& a, const RationalComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend RationalComplex operator*(const RationalComplex& a, const RationalComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
        return a.re == b.re && a.im == b.im;
    }
};

template <>
struct CoeffTraits<RationalComplex> {
    static RationalComplex conjugate(const RationalComplex& c) { return {c.re, -c.im}; }
    // compare numerators: mixed rational/int operator== self-recurses under
    // C++20 reversed-candidate lookup in this boost version
    static bool is_zero(const RationalComplex& c) {
        return c.re.numerator() == 0 && c.im.numerator() == 0;
    }
};

using RationalSymbol = BasicPolySymbol<RationalComplex>;

inline Complex to_complex(const RationalComplex& c) {
    return {boost::rational_cast<double>(c.re), boost::rational_cast<double>(c.im)};
}

inline PolySymbol to_double(const RationalSymbol& a) {
    std::map<TermKey, Complex> t;
    for (const auto& [key, c] : a.terms()) t[key] = to_complex(c);
    return PolySymbol::from_terms(a.dim(), std::move(t));
}

// ||z^alpha||^2 = alpha! / prod_{j=1..|alpha|} (n + t + j), exact in rational t.
inline Rational rational_monomial_norm_sq(int n, const Rational& t, const MultiIndex& alpha) {
    Rational v(1);
    int j = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        for (int k = 1; k <= alpha[i]; ++k) {
            ++j;
            v *= Rational(k) / (Rational(n + j) + t);
        }
    }
    return v;
}

} // namespace balltrace
