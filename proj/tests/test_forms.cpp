#include <cmath>
#include <random>

#include "balltrace/forms.hpp"
#include "balltrace/quantization.hpp"
#include "balltrace/special.hpp"
#include "doctest.h"

using namespace balltrace;

namespace {

MultiIndex mi(std::initializer_list<int> v) { return MultiIndex(v); }

PolySymbol rand_symbol(std::mt19937& rng, int n, int max_deg, int nterms) {
    std::uniform_int_distribution<int> e(0, max_deg);
    std::uniform_int_distribution<int> c(-2, 2);
    std::map<TermKey, Complex> t;
    for (int k = 0; k < nterms; ++k) {
        MultiIndex h(static_cast<std::size_t>(n)), a(static_cast<std::size_t>(n));
        for (auto& v : h) v = e(rng);
        for (auto& v : a) v = e(rng);
        t[TermKey{h, a}] += Complex(c(rng), c(rng));
    }
    return PolySymbol::from_terms(n, std::move(t));
}

struct McEstimate {
    double mean = 0.0, se = 0.0;
};

// uniform samples in the ball by rejection from the bounding polydisc box
McEstimate mc_ball_integral(std::mt19937_64& rng, int n, std::size_t samples,
                            const std::function<double(const Point&)>& u) {
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    const double box_volume = std::pow(4.0, n);
    double s1 = 0.0, s2 = 0.0;
    std::vector<Complex> cs(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < samples; ++k) {
        double r2 = 0.0;
        for (auto& c : cs) {
            c = Complex(box(rng), box(rng));
            r2 += std::norm(c);
        }
        const double w = r2 < 1.0 ? box_volume * u(Point(cs)) : 0.0;
        s1 += w;
        s2 += w * w;
    }
    const double mean = s1 / static_cast<double>(samples);
    const double var = s2 / static_cast<double>(samples) - mean * mean;
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(samples))};
}

double mono_moment(const Point& z, const MultiIndex& alpha, double s) {
    double v = std::pow(1.0 - z.norm_sq(), s);
    for (std::size_t i = 0; i < alpha.size(); ++i)
        v *= std::pow(std::norm(z[i]), alpha[i]);
    return v;
}

} // namespace

TEST_CASE("ball moments evaluate the closed product form") {
    CHECK(ball_moment(1, mi({0}), mi({0}), 0.0) == doctest::Approx(M_PI).epsilon(1e-15));
    CHECK(ball_moment(2, mi({0, 0}), mi({0, 0}), 0.0) ==
          doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-15));
    CHECK(ball_moment(1, mi({2}), mi({1}), 0.0) == 0.0);
    CHECK(ball_moment(2, mi({3, 1}), mi({3, 1}), 1.5) ==
          doctest::Approx(std::pow(M_PI, 2) * 6.0 /
                          (2.5 * 3.5 * 4.5 * 5.5 * 6.5 * 7.5))
              .epsilon(1e-14));
    CHECK_THROWS_AS(ball_moment(1, mi({0}), mi({0}), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(ball_moment(2, mi({0}), mi({0, 0}), 0.0), std::invalid_argument);

    // normalized moments reproduce the weighted monomial norms
    for (const double t : {-0.5, 0.0, 2.5}) {
        const MultiIndex a = mi({2, 1});
        CHECK(ball_moment(2, a, a, t) / ball_moment(2, mi({0, 0}), mi({0, 0}), t) ==
              doctest::Approx(monomial_norm_sq(2, WeightParam(t), a)).epsilon(1e-13));
    }
}

TEST_CASE("ball moments agree with Monte-Carlo") {
    std::mt19937_64 rng(4501);
    std::mt19937 idx(77);
    std::uniform_int_distribution<int> deg(0, 3);
    std::uniform_real_distribution<double> sdist(-0.3, 2.5);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 1 + rep % 2;
        MultiIndex alpha(static_cast<std::size_t>(n));
        for (auto& v : alpha) v = deg(idx);
        const double s = sdist(rng);
        const auto est = mc_ball_integral(
            rng, n, 1000000, [&](const Point& z) { return mono_moment(z, alpha, s); });
        const double exact = ball_moment(n, alpha, alpha, s);
        CHECK(std::abs(est.mean - exact) <= 3.0 * est.se + 1e-12);
    }
}

TEST_CASE("weighted polynomial integrals are termwise moments") {
    CHECK(weighted_poly_integral(PolySymbol::constant(1, 1.0), 0.0).real() ==
          doctest::Approx(M_PI).epsilon(1e-15));
    CHECK(weighted_poly_integral(parse_symbol("z1*z1~", 1), 0.0).real() ==
          doctest::Approx(M_PI / 2.0).epsilon(1e-15));

    std::mt19937 rng(52);
    for (int rep = 0; rep < 10; ++rep) {
        const auto u = rand_symbol(rng, 2, 3, 4);
        const auto v = rand_symbol(rng, 2, 3, 4);
        const Complex a(1.5, -2.0);
        const Complex lhs = weighted_poly_integral(a * u + v, 0.75);
        const Complex rhs = a * weighted_poly_integral(u, 0.75) + weighted_poly_integral(v, 0.75);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("defect quotients invert multiplication by the defect") {
    CHECK(defect_quotient(defect_power(2, 3), 1) == defect_power(2, 2));
    CHECK(defect_quotient(defect_power(1, 4), 4) == defect_power(1, 0));

    std::mt19937 rng(53);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 1 + rep % 2;
        const auto q = rand_symbol(rng, n, 2, 3);
        const auto prod = sym_mul(q, defect_power(n, 2));
        const auto back = defect_quotient(prod, 2);
        const auto diff = back - q;
        double worst = 0.0;
        for (const auto& [key, c] : diff.terms()) worst = std::max(worst, std::abs(c));
        CHECK(worst <= 1e-11);
    }

    CHECK_THROWS_AS(defect_quotient(parse_symbol("1 + z1", 1), 1), std::runtime_error);
}

TEST_CASE("helton-howe integrals hit the volume normalizations") {
    const auto z = PolySymbol::variable(1, 0);
    const auto zb = PolySymbol::conj_variable(1, 0);
    CHECK(std::abs(helton_howe_integral({z, zb}) - Complex(-1.0)) <= 1e-14);

    const std::vector<PolySymbol> quad = {
        PolySymbol::variable(2, 0), PolySymbol::conj_variable(2, 0),
        PolySymbol::variable(2, 1), PolySymbol::conj_variable(2, 1)};
    CHECK(std::abs(helton_howe_integral(quad) - Complex(1.0)) <= 1e-14);

    // wedge of equal forms vanishes exactly, and transposition flips the sign
    std::mt19937 rng(54);
    for (int rep = 0; rep < 6; ++rep) {
        const auto f = rand_symbol(rng, 1, 3, 3);
        const auto g = rand_symbol(rng, 1, 3, 3);
        CHECK(helton_howe_integral({f, f}) == Complex(0.0));
        CHECK(helton_howe_integral({g, f}) == -helton_howe_integral({f, g}));
    }

    CHECK_THROWS_AS(helton_howe_integral({z}), std::invalid_argument);
    CHECK_THROWS_AS(helton_howe_integral({z, zb, z}), std::invalid_argument);
}

TEST_CASE("stokes reduction to the boundary circle") {
    std::mt19937 rng(55);
    const int m = 512;
    for (int rep = 0; rep < 8; ++rep) {
        const auto f = rand_symbol(rng, 1, 3, 3);
        const auto g = rand_symbol(rng, 1, 3, 3);
        // (1/2 pi i) contour integral of f dg = mean over the circle of
        // f (z del g - zbar dbar g)
        Complex boundary(0.0);
        for (int j = 0; j < m; ++j) {
            const Complex zc = std::polar(1.0, 2.0 * M_PI * j / m);
            const Point p{zc};
            boundary += eval(f, p) *
                        (zc * eval(d_holo(g, 0), p) - std::conj(zc) * eval(d_anti(g, 0), p));
        }
        boundary /= static_cast<double>(m);
        CHECK(std::abs(helton_howe_integral({f, g}) - boundary) <= 1e-8);
    }
}

TEST_CASE("mixed wedge integrals expand del-dbar pairs") {
    const auto z = PolySymbol::variable(1, 0);
    const auto zb = PolySymbol::conj_variable(1, 0);
    CHECK(std::abs(mixed_wedge_integral({z}, {zb}) - Complex(-1.0)) <= 1e-14);
    CHECK(std::abs(mixed_wedge_integral({parse_symbol("z1^2", 1)}, {zb})) <= 1e-15);
    CHECK(std::abs(mixed_wedge_integral({parse_symbol("z1 + z1~", 1)},
                                        {parse_symbol("z1^2 + 3*z1", 1)})) <= 1e-15);

    // product bound target: f_j = (1-|z|^2) z_j on the two-ball
    const auto f1 = sym_mul(defect_power(2, 1), PolySymbol::variable(2, 0));
    const auto f2 = sym_mul(defect_power(2, 1), PolySymbol::variable(2, 1));
    const Complex s4 = mixed_wedge_integral({f1, f2}, {sym_conj(f1), sym_conj(f2)});
    CHECK(std::abs(s4 - Complex(1.0 / 60.0)) <= 1e-14);

    CHECK_THROWS_AS(mixed_wedge_integral({z, zb}, {zb}), std::invalid_argument);
}

TEST_CASE("disk semi-commutator right-hand sides") {
    const auto z = PolySymbol::variable(1, 0);
    const auto zb = PolySymbol::conj_variable(1, 0);
    const auto zzb = parse_symbol("z1*z1~", 1);

    const auto harmonic = disk_semicommutator_rhs(z, zb, WeightParam(0.0));
    CHECK(std::abs(harmonic.term1 - Complex(-1.0)) <= 1e-14);
    CHECK(std::abs(harmonic.term2) == 0.0);

    // Tr sigma_t(z zbar, z zbar) has closed diagonal sums:
    // pi^2/6 - 2 at t = 0 and 2 pi^2/3 - 7 at t = 1
    QuadratureSpec spec;
    spec.tolerance = 1e-8;
    const auto rhs0 = disk_semicommutator_rhs(zzb, zzb, WeightParam(0.0), spec);
    CHECK(std::abs(rhs0.term1 - Complex(-0.5)) <= 1e-14);
    CHECK(rhs0.term2.real() > 0.0);
    CHECK(std::abs(rhs0.total() - Complex(M_PI * M_PI / 6.0 - 2.0)) <= 2e-6);

    const auto rhs1 = disk_semicommutator_rhs(zzb, zzb, WeightParam(1.0), spec);
    CHECK(std::abs(rhs1.total() - Complex(2.0 * M_PI * M_PI / 3.0 - 7.0)) <= 2e-6);

    // at t = -1 the semi-commutator of z zbar with itself vanishes entrywise,
    // so term2 must come out to exactly +1/2
    const auto hardy = disk_semicommutator_rhs(zzb, zzb, WeightParam(-1.0), spec);
    CHECK(std::abs(hardy.term1 - Complex(-0.5)) <= 1e-14);
    CHECK(std::abs(hardy.term2 - Complex(0.5)) <= 2e-6);
    CHECK(std::abs(hardy.total()) <= 2e-6);

    // rho depends only on the Mobius distance, so term2 is symmetric
    const auto q = parse_symbol("z1^2*z1~^2", 1);
    const auto ab = disk_semicommutator_rhs(zzb, q, WeightParam(0.5), spec);
    const auto ba = disk_semicommutator_rhs(q, zzb, WeightParam(0.5), spec);
    CHECK(std::abs(ab.term2 - ba.term2) <= 1e-8);

    // direct tensor quadrature cross-checks the angular-mode reduction
    QuadratureSpec direct;
    direct.mobius = false;
    direct.radial_order = 24;
    direct.angular_order = 32;
    const auto rhs0d = disk_semicommutator_rhs(zzb, zzb, WeightParam(0.0), direct);
    CHECK(std::abs(rhs0d.term2 - rhs0.term2) <= 5e-3);

    CHECK_THROWS_AS(disk_semicommutator_rhs(PolySymbol::variable(2, 0),
                                            PolySymbol::conj_variable(2, 0), WeightParam(0.0)),
                    std::invalid_argument);
}

TEST_CASE("hardy rho double integral is the weighted family's limit") {
    const auto zzb = parse_symbol("z1*z1~", 1);
    QuadratureSpec spec;
    spec.tolerance = 1e-8;
    const double at_hardy = disk_semicommutator_rhs(zzb, zzb, WeightParam(-1.0), spec).term2.real();
    const double near_hardy =
        disk_semicommutator_rhs(zzb, zzb, WeightParam(-1.0 + 1e-4), spec).term2.real();
    CHECK(std::abs(at_hardy - near_hardy) <= 1e-3 * std::abs(at_hardy));
}

TEST_CASE("quantization limit integrals reduce to exact moments") {
    const auto z = PolySymbol::variable(1, 0);
    const auto zb = PolySymbol::conj_variable(1, 0);

    // C1(z, zbar) = -(1-|z|^2)^2, so the p=2 density is (1-|z|^2)^2 and the
    // integral is 1/3
    CHECK(cc_limit_integral({z, z}, {zb, zb}, 2, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(cc_limit_integral({z, PolySymbol::constant(1, 2.0)}, {zb, zb}, 2, 1) == 0.0);
    CHECK_THROWS_AS(cc_limit_integral({z}, {zb}, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(cc_limit_integral({z, z}, {zb}, 2, 1), std::invalid_argument);

    // Monte-Carlo oracle for the p=2 density against the exact pipeline
    std::mt19937_64 rng(4502);
    const auto est = mc_ball_integral(rng, 1, 2000000, [](const Point& p) {
        const double d = 1.0 - p.norm_sq();
        return d * d / M_PI;
    });
    CHECK(std::abs(est.mean - 1.0 / 3.0) <= 3.0 * est.se);

    // bracket route: prod {f_j,g_j} (-i)^p equals prod of n (C1 - C1 transposed)
    std::mt19937 prng(56);
    for (int rep = 0; rep < 6; ++rep) {
        const int n = 1;
        const auto f1 = rand_symbol(prng, n, 2, 3);
        const auto g1 = rand_symbol(prng, n, 2, 3);
        const auto f2 = rand_symbol(prng, n, 2, 3);
        const auto g2 = rand_symbol(prng, n, 2, 3);
        auto anti = [](const PolySymbol& f, const PolySymbol& g) {
            return C1_closed(f, g) - C1_closed(g, f);
        };
        const PolySymbol via_bracket =
            Complex(0.0, -1.0) * Complex(0.0, -1.0) *
            sym_mul(poisson_bracket(f1, g1), poisson_bracket(f2, g2));
        const PolySymbol via_c1 = sym_mul(anti(f1, g1), anti(f2, g2));
        const auto diff = via_bracket - Complex(std::pow(static_cast<double>(n), 2)) * via_c1;
        double worst = 0.0;
        for (const auto& [key, c] : diff.terms()) worst = std::max(worst, std::abs(c));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("hankel limit integrals and integrand positivity") {
    const auto zb = PolySymbol::conj_variable(1, 0);
    CHECK(hankel_limit_integral(zb, 2, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(hankel_limit_integral(parse_symbol("z1^2 + z1", 1), 2, 1) == 0.0);
    CHECK_THROWS_AS(hankel_limit_integral(zb, 1, 1), std::invalid_argument);

    // |Rbar g|^2 <= |z|^2 |dbar g|^2 pointwise for g = zbar
    std::mt19937_64 rng(4503);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    const auto g = parse_symbol("z1~ + z1~^2", 1);
    PolySymbol density = sym_mul(d_anti(g, 0), sym_conj(d_anti(g, 0)));
    const auto rb = radial_Rbar(g);
    density = density - sym_mul(rb, sym_conj(rb));
    for (int rep = 0; rep < 200; ++rep) {
        Complex zc(u(rng), u(rng));
        if (std::norm(zc) >= 1.0) continue;
        CHECK(eval(density, Point{zc}).real() >= -1e-12);
    }
}

TEST_CASE("quadrature specs validate their fields") {
    QuadratureSpec bad;
    bad.radial_order = 2;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = {};
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    CHECK_NOTHROW(validate(QuadratureSpec{}));
}
