#include "balltrace/symbols.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace balltrace {

namespace {

// grammar:
//   expr    := ['+'|'-'] term (('+'|'-') term)*
//   term    := factor ('*' factor)*
//   factor  := primary ('^' uint)?
//   primary := number | 'i' | 'z'<uint>['~'] | 'conj' '(' expr ')'
//            | 'defect' '(' uint ')' | '(' expr ')'
struct Parser {
    const char* p;
    int n;

    explicit Parser(const char* text, int dim) : p(text), n(dim) {}

    void skip() {
        while (*p == ' ' || *p == '\t') ++p;
    }
    bool eat(char c) {
        skip();
        if (*p != c) return false;
        ++p;
        return true;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("parse_symbol: " + what + " near '" + std::string(p) + "'");
    }

    int parse_uint() {
        skip();
        if (!std::isdigit(static_cast<unsigned char>(*p))) fail("expected integer");
        long v = 0;
        while (std::isdigit(static_cast<unsigned char>(*p))) {
            v = v * 10 + (*p - '0');
            if (v > 1000000) fail("integer too large");
            ++p;
        }
        return static_cast<int>(v);
    }

    PolySymbol expr() {
        skip();
        bool neg = false;
        if (*p == '+' || *p == '-') neg = (*p++ == '-');
        PolySymbol acc = term();
        if (neg) acc = Complex(-1.0) * acc;
        while (true) {
            skip();
            if (*p == '+' || *p == '-') {
                const bool minus = (*p++ == '-');
                PolySymbol t = term();
                acc = minus ? acc - t : acc + t;
            } else {
                return acc;
            }
        }
    }

    PolySymbol term() {
        PolySymbol acc = factor();
        while (eat('*')) acc = sym_mul(acc, factor());
        return acc;
    }

    PolySymbol factor() {
        PolySymbol base = primary();
        skip();
        if (*p == '^') {
            ++p;
            const int k = parse_uint();
            PolySymbol acc = PolySymbol::constant(n, 1.0);
            for (int j = 0; j < k; ++j) acc = sym_mul(acc, base);
            return acc;
        }
        return base;
    }

    PolySymbol primary() {
        skip();
        if (std::isdigit(static_cast<unsigned char>(*p)) || *p == '.') {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p) fail("bad number");
            p = end;
            return PolySymbol::constant(n, v);
        }
        if (*p == '(') {
            ++p;
            PolySymbol inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::strncmp(p, "conj", 4) == 0 && !std::isalnum(static_cast<unsigned char>(p[4]))) {
            p += 4;
            if (!eat('(')) fail("expected '(' after conj");
            PolySymbol inner = expr();
            if (!eat(')')) fail("expected ')'");
            return sym_conj(inner);
        }
        if (std::strncmp(p, "defect", 6) == 0) {
            p += 6;
            if (!eat('(')) fail("expected '(' after defect");
            const int m = parse_uint();
            if (!eat(')')) fail("expected ')'");
            return defect_power(n, m);
        }
        if (*p == 'i' && !std::isalnum(static_cast<unsigned char>(p[1]))) {
            ++p;
            return PolySymbol::constant(n, Complex(0.0, 1.0));
        }
        if (*p == 'z') {
            ++p;
            const int k = parse_uint();
            if (k < 1 || k > n) fail("variable index out of range");
            const bool anti = eat('~');
            return anti ? PolySymbol::conj_variable(n, k - 1) : PolySymbol::variable(n, k - 1);
        }
        fail("unexpected input");
    }
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// magnitude part of a real number as a parseable factor string
std::string real_factor(double mag) { return fmt_double(mag); }

void append_monomial(std::string& out, const TermKey& key, bool leading_one) {
    bool first = out.empty() && leading_one;
    auto push = [&](const std::string& f) {
        if (!out.empty()) out += "*";
        out += f;
        first = false;
    };
    for (std::size_t i = 0; i < key.holo.size(); ++i) {
        if (key.holo[i] > 0) {
            std::string f = "z" + std::to_string(i + 1);
            if (key.holo[i] > 1) f += "^" + std::to_string(key.holo[i]);
            push(f);
        }
    }
    for (std::size_t i = 0; i < key.anti.size(); ++i) {
        if (key.anti[i] > 0) {
            std::string f = "z" + std::to_string(i + 1) + "~";
            if (key.anti[i] > 1) f += "^" + std::to_string(key.anti[i]);
            push(f);
        }
    }
    (void)first;
}

} // namespace

PolySymbol parse_symbol(const std::string& text, int n) {
    Parser parser(text.c_str(), n);
    PolySymbol s = parser.expr();
    parser.skip();
    if (*parser.p != '\0') parser.fail("trailing input");
    return s;
}

std::string print_symbol(const PolySymbol& a) {
    if (a.is_zero()) return "0";
    std::string out;
    for (const auto& [key, c] : a.terms()) {
        const double re = c.real(), im = c.imag();
        bool neg = false;
        std::string coeffstr;
        if (im == 0.0) {
            neg = std::signbit(re);
            coeffstr = real_factor(std::abs(re));
        } else if (re == 0.0) {
            neg = std::signbit(im);
            const double mag = std::abs(im);
            coeffstr = (mag == 1.0) ? "i" : real_factor(mag) + "*i";
        } else {
            // general complex coefficient as a parenthesized expression
            coeffstr = "(" + fmt_double(re) + (std::signbit(im) ? " - " : " + ") +
                       real_factor(std::abs(im)) + "*i)";
        }
        std::string mono;
        append_monomial(mono, key, false);
        std::string body;
        if (mono.empty()) {
            body = coeffstr;
        } else if (coeffstr == "1") {
            body = mono;
        } else {
            body = coeffstr + "*" + mono;
        }
        if (out.empty()) {
            out = (neg ? "-" : "") + body;
        } else {
            out += (neg ? " - " : " + ") + body;
        }
    }
    return out;
}

} // namespace balltrace
