#include <doctest.h>

#include "balltrace/geometry.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace balltrace;

namespace {

std::vector<Complex> random_interior(int n, std::mt19937& rng, double rmax = 0.95) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Complex> v(static_cast<std::size_t>(n));
    double nn = 0.0;
    for (auto& c : v) {
        c = {N(rng), N(rng)};
        nn += std::norm(c);
    }
    const double r = rmax * std::pow(U(rng), 1.0 / (2.0 * n)) / std::sqrt(nn);
    for (auto& c : v) c *= r;
    return v;
}

// uniform w.r.t. Lebesgue measure on the ball of real dimension 2n
std::vector<Complex> uniform_ball(int n, std::mt19937& rng) {
    return random_interior(n, rng, 1.0);
}

double dist_sq(const Point& a, const Point& b) {
    double acc = 0.0;
    for (int i = 0; i < a.dim(); ++i) acc += std::norm(a[i] - b[i]);
    return acc;
}

} // namespace

TEST_CASE("mobius_apply basic examples") {
    // phi_0 = -identity
    Point w({Complex(0.3, 0.1), Complex(-0.2, 0.4)});
    Point z0({Complex(0.0), Complex(0.0)});
    Point img = mobius_apply(MobiusMap(z0), w);
    CHECK(img[0] == -w[0]);
    CHECK(img[1] == -w[1]);
    // phi_z(z) = 0
    Point z({Complex(0.5, -0.2), Complex(0.1, 0.3)});
    Point fix = mobius_apply(MobiusMap(z), z);
    CHECK(std::sqrt(fix.norm_sq()) <= 1e-14);
    // n=1: phi_{0.5}(0) = 0.5
    Point c1({Complex(0.5)});
    Point o1({Complex(0.0)});
    Point i1 = mobius_apply(MobiusMap(c1), o1);
    CHECK(i1[0].real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(i1[0].imag() == doctest::Approx(0.0).epsilon(1e-15));
    // boundary center rejected
    CHECK_THROWS_AS(MobiusMap(Point({Complex(1.0)})), std::domain_error);
}

TEST_CASE("mobius involution") {
    std::mt19937 rng(11);
    for (int n : {1, 2, 3}) {
        for (int rep = 0; rep < 50; ++rep) {
            Point z(random_interior(n, rng));
            Point w(random_interior(n, rng));
            MobiusMap phi(z);
            Point back = mobius_apply(phi, mobius_apply(phi, w));
            CHECK(std::sqrt(dist_sq(back, w)) <= 1e-12);
        }
    }
}

TEST_CASE("mobius modulus identity") {
    // 1 - |phi_z(w)|^2 = (1-|z|^2)(1-|w|^2)/|1-<z,w>|^2
    std::mt19937 rng(12);
    for (int n : {1, 2, 3}) {
        for (int rep = 0; rep < 50; ++rep) {
            Point z(random_interior(n, rng));
            Point w(random_interior(n, rng));
            const double lhs = 1.0 - mobius_apply(MobiusMap(z), w).norm_sq();
            const double rhs = (1.0 - z.norm_sq()) * (1.0 - w.norm_sq()) /
                               std::norm(1.0 - inner(z, w));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("a_matrix structure and defining identity") {
    // z = 0: identity
    Eigen::MatrixXcd a0 = a_matrix(Point({Complex(0.0), Complex(0.0)}));
    CHECK((a0 - Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);
    // z = (r, 0): diag(1-r^2, sqrt(1-r^2))
    const double r = 0.6;
    Eigen::MatrixXcd ar = a_matrix(Point({Complex(r), Complex(0.0)}));
    CHECK(ar(0, 0).real() == doctest::Approx(1.0 - r * r).epsilon(1e-14));
    CHECK(ar(1, 1).real() == doctest::Approx(std::sqrt(1.0 - r * r)).epsilon(1e-14));
    CHECK(std::abs(ar(0, 1)) <= 1e-15);
    CHECK(std::abs(ar(1, 0)) <= 1e-15);
    // (1 - <w,z>)(z - phi_z(w)) = A_z w at random points
    std::mt19937 rng(13);
    for (int n : {1, 2, 3}) {
        for (int rep = 0; rep < 100; ++rep) {
            Point z(random_interior(n, rng));
            Point w(random_interior(n, rng));
            Eigen::MatrixXcd a = a_matrix(z);
            Point img = mobius_apply(MobiusMap(z), w);
            const Complex factor = 1.0 - inner(w, z);
            for (int i = 0; i < n; ++i) {
                Complex aw = 0.0;
                for (int j = 0; j < n; ++j) aw += a(i, j) * w[j];
                CHECK(std::abs(factor * (z[i] - img[i]) - aw) <= 1e-12);
            }
        }
    }
}

TEST_CASE("bergman_kernel values") {
    Point zero1({Complex(0.0)});
    Point half({Complex(0.5)});
    CHECK(bergman_kernel(1, 0.0, half, zero1) == Complex(1.0));
    CHECK(bergman_kernel(1, 0.0, half, half).real() ==
          doctest::Approx(16.0 / 9.0).epsilon(1e-14));
    Point zero2({Complex(0.0), Complex(0.0)});
    CHECK(bergman_kernel(2, -1.0, zero2, zero2) == Complex(1.0));
    // Hardy exponent is n
    Point w2({Complex(0.3), Complex(0.4)});
    const Complex d = 1.0 - inner(w2, w2);
    CHECK(std::abs(bergman_kernel(2, -1.0, w2, w2) - std::pow(d, -2.0)) <= 1e-14);
    // singular on the diagonal sphere point
    Point e1({Complex(1.0), Complex(0.0)});
    CHECK_THROWS_AS(bergman_kernel(2, 0.0, e1, e1), std::domain_error);
}

TEST_CASE("pseudo_metric properties") {
    Point z({Complex(0.5)});
    CHECK(pseudo_metric(z, z) <= 1e-14);
    CHECK(pseudo_metric(z, Point({Complex(0.0)})) == doctest::Approx(0.5).epsilon(1e-14));
    std::mt19937 rng(14);
    for (int n : {1, 2}) {
        for (int rep = 0; rep < 50; ++rep) {
            Point a(random_interior(n, rng));
            Point b(random_interior(n, rng));
            const double ab = pseudo_metric(a, b);
            CHECK(ab >= 0.0);
            CHECK(ab <= 1.0);
            CHECK(ab == doctest::Approx(pseudo_metric(b, a)).epsilon(1e-12));
        }
    }
    // boundary second argument is allowed when the first is interior
    Point bd({Complex(1.0)});
    CHECK(pseudo_metric(z, bd) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(pseudo_metric(bd, bd), std::domain_error);
}

TEST_CASE("sqrt kernel distance satisfies the triangle inequality") {
    // d(z,w) = |1 - <z,w>|^{1/2} on closed-ball triples
    std::mt19937 rng(15);
    for (int rep = 0; rep < 200; ++rep) {
        Point a(uniform_ball(2, rng));
        Point b(uniform_ball(2, rng));
        Point c(uniform_ball(2, rng));
        auto d = [](const Point& x, const Point& y) {
            return std::sqrt(std::abs(1.0 - inner(x, y)));
        };
        CHECK(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
    }
}

TEST_CASE("defect bound against the kernel denominator") {
    // 1 - |z|^2 <= 2 |1 - <z,w>|
    std::mt19937 rng(16);
    for (int rep = 0; rep < 200; ++rep) {
        Point z(uniform_ball(2, rng));
        Point w(uniform_ball(2, rng));
        CHECK(1.0 - z.norm_sq() <= 2.0 * std::abs(1.0 - inner(z, w)) + 1e-12);
    }
}

TEST_CASE("mobius change of variables by Monte Carlo") {
    // int h dm = int (h o phi_z) Jac dm with Jac = ((1-|z|^2)/|1-<w,z>|^2)^(n+1)
    const int n = 2;
    Point z({Complex(0.3, 0.1), Complex(-0.2, 0.0)});
    MobiusMap phi(z);
    auto h = [](const Point& p) {
        return std::exp(-p.norm_sq()) + 0.5 * p[0].real() * p[0].real();
    };
    std::mt19937 rng(17);
    const int samples = 400000;
    double sum_direct = 0.0, sum_pulled = 0.0;
    for (int i = 0; i < samples; ++i) {
        Point w(uniform_ball(n, rng));
        sum_direct += h(w);
        const double jac = std::pow((1.0 - z.norm_sq()) / std::norm(1.0 - inner(w, z)),
                                    n + 1.0);
        sum_pulled += h(mobius_apply(phi, w)) * jac;
    }
    CHECK(sum_pulled / samples == doctest::Approx(sum_direct / samples).epsilon(1e-3));
}
