#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "balltrace/config.hpp"
#include "balltrace/experiments.hpp"
#include "balltrace/forms.hpp"
#include "balltrace/geometry.hpp"
#include "balltrace/operators.hpp"
#include "balltrace/special.hpp"
#include "balltrace/traces.hpp"

namespace {

using namespace balltrace;

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    if (!ok) ++g_failures;
    std::printf("selftest %-22s %s%s%s\n", name, ok ? "pass" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
}

std::string dev(double d) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "(max dev %.2e)", d);
    return buf;
}

Point random_interior(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Complex> c(static_cast<std::size_t>(n));
    double s = 0.0;
    do {
        s = 0.0;
        for (auto& z : c) {
            z = Complex(gauss(rng), gauss(rng));
            s += std::norm(z);
        }
    } while (s == 0.0);
    const double r = 0.9 * std::pow(u01(rng), 1.0 / (2.0 * n));
    const double scale = r / std::sqrt(s);
    for (auto& z : c) z *= scale;
    return Point(std::move(c));
}

void check_mobius(std::mt19937_64& rng) {
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const Point z = random_interior(rng, n);
        const Point w = random_interior(rng, n);
        const MobiusMap map(z);
        const Point back = mobius_apply(map, mobius_apply(map, w));
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(back[i] - w[i]));
        const double fwd = std::sqrt(mobius_apply(map, w).norm_sq());
        const double rev = std::sqrt(mobius_apply(MobiusMap(w), z).norm_sq());
        worst = std::max(worst, std::abs(fwd - rev));
        worst = std::max(worst, std::abs(pseudo_metric(z, w) - fwd));
        // (1 - <w,z>)(z - phi_z(w)) = A_z w
        const Eigen::MatrixXcd A = a_matrix(z);
        Eigen::VectorXcd wv(n), lhs(n);
        const Complex factor = Complex(1.0) - inner(w, z);
        const Point img = mobius_apply(map, w);
        for (int i = 0; i < n; ++i) {
            wv(i) = w[i];
            lhs(i) = factor * (z[i] - img[i]);
        }
        worst = std::max(worst, (lhs - A * wv).cwiseAbs().maxCoeff());
    }
    report("mobius-identities", worst <= 1e-11, dev(worst));
}

void check_diagonal_law() {
    double worst = 0.0;
    for (int n = 1; n <= 2; ++n) {
        for (double t : {-1.0, 0.0, 1.5}) {
            for (int i = 0; i < n; ++i) {
                const auto sc = semi_commutator(PolySymbol::variable(n, i),
                                                PolySymbol::conj_variable(n, i),
                                                WeightParam(t), 6);
                const auto& basis = sc.basis();
                const auto core = sc.core_block();
                for (Eigen::Index r = 0; r < core.rows(); ++r) {
                    for (Eigen::Index c = 0; c < core.cols(); ++c) {
                        Complex expect = 0.0;
                        if (r == c) {
                            const MultiIndex& a = basis.index(static_cast<std::size_t>(r));
                            const double d = degree(a);
                            const double den = (n + d + t) * (n + d + t + 1.0);
                            expect = (n + d + t == 0.0)
                                         ? Complex(-1.0)
                                         : Complex(-(d - a[static_cast<std::size_t>(i)] + n + t) / den);
                        }
                        worst = std::max(worst, std::abs(core(r, c) - expect));
                    }
                }
            }
        }
    }
    report("coordinate-diagonals", worst <= 1e-12, dev(worst));
}

void check_commutator_trace(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coef(-2, 2), expo(0, 2);
    auto random_symbol = [&]() {
        std::map<TermKey, Complex> terms;
        for (int k = 0; k < 4; ++k) {
            TermKey key{MultiIndex{expo(rng)}, MultiIndex{expo(rng)}};
            terms[key] = terms[key] + Complex(coef(rng), coef(rng));
        }
        return PolySymbol::from_terms(1, std::move(terms));
    };
    double worst = 0.0;
    const auto basis = build_basis(1, WeightParam(0.7), 12);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::MatrixXcd A = toeplitz_matrix(random_symbol(), *basis);
        const Eigen::MatrixXcd B = toeplitz_matrix(random_symbol(), *basis);
        worst = std::max(worst, std::abs((A * B - B * A).trace()));
    }
    report("commutator-trace-zero", worst <= 1e-9, dev(worst));
}

void check_antisym_cancellation() {
    const PolySymbol f = parse_symbol("z1 + 2*z1~^2", 1);
    const auto series = antisym_trace({f, f}, WeightParam(0.0), 10);
    bool ok = true;
    for (const Complex& s : series.shells) ok = ok && s == Complex(0.0);
    report("antisym-exact-zero", ok, ok ? "(all shells identically 0)" : "");
}

void check_rho() {
    double worst = 0.0;
    for (int i = 1; i < 60; ++i) {
        const double s = i / 60.0;
        const double closed = -std::log(s) / (16.0 * kPi * kPi);
        worst = std::max(worst, std::abs(rho(WeightParam(-1.0), s) - closed) /
                                    std::abs(closed));
    }
    bool positive = true;
    for (double t : {0.0, 1.0, 5.0})
        for (int i = 0; i < 60; ++i) positive = positive && rho(WeightParam(t), (i + 0.5) / 60.0) > 0.0;
    report("rho-kernel", worst <= 1e-14 && positive, dev(worst));
}

void check_c_coeff() {
    bool exact = true;
    for (int n = 1; n <= 3; ++n)
        for (double t : {0.0, 2.5}) exact = exact && c_coeff(n, 0, WeightParam(t)) == 1.0;
    const double c10 = c_coeff(1, 1, WeightParam(0.0));
    const double d = std::abs(c10 - 1.0);
    report("quantization-coeffs", exact && d <= 1e-10, dev(d));
}

void check_determinism() {
    ExperimentConfig cfg = parse_config(
        "experiment = helton-howe\nn = 1\nf = z1; z1~\nt = 0, 1\nN = 16\ntolerance = 1e-4\n");
    auto csv = [](const VerificationReport& rep) {
        std::ostringstream os;
        write_csv(rep, os);
        return os.str();
    };
    const std::string a = csv(run(cfg));
    const std::string b = csv(run(cfg));
    cfg.workers = 2;
    const std::string c = csv(run(cfg));
    const bool ok = a == b && a == c;
    report("report-determinism", ok, ok ? "(csv byte-identical, 1 and 2 workers)" : "");
}

} // namespace

int run_selftest(unsigned long seed) {
    std::mt19937_64 rng(seed);
    check_mobius(rng);
    check_diagonal_law();
    check_commutator_trace(rng);
    check_antisym_cancellation();
    check_rho();
    check_c_coeff();
    check_determinism();
    if (g_failures == 0) {
        std::printf("selftest: all suites pass\n");
        return 0;
    }
    std::printf("selftest: %d suite(s) FAILED\n", g_failures);
    return 1;
}
