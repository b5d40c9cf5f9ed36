#include "balltrace/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>

namespace balltrace {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix of the
// orthogonal-polynomial recurrence, weights are mu0 * (first eigenvector row)^2.
GaussRule golub_welsch(const std::vector<double>& diag, const std::vector<double>& offdiag,
                       double mu0) {
    const int m = static_cast<int>(diag.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) J(i, i) = diag[i];
    for (int i = 0; i + 1 < m; ++i) J(i, i + 1) = J(i + 1, i) = offdiag[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule r;
    r.nodes.resize(m);
    r.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        const double q0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * q0 * q0;
    }
    return r;
}

// Jacobi-polynomial recurrence coefficients for weight (1-x)^a (1+x)^b on [-1,1].
GaussRule gauss_jacobi_pm1(int m, double a, double b, double mu0) {
    std::vector<double> al(m), be(m > 1 ? m - 1 : 0);
    al[0] = (b - a) / (a + b + 2.0);
    for (int k = 1; k < m; ++k) {
        const double s = 2.0 * k + a + b;
        al[k] = (b * b - a * a) / (s * (s + 2.0));
    }
    if (m > 1) {
        be[0] = std::sqrt(4.0 * (1.0 + a) * (1.0 + b) /
                          ((a + b + 2.0) * (a + b + 2.0) * (a + b + 3.0)));
        for (int k = 2; k < m; ++k) {
            const double s = 2.0 * k + a + b;
            be[k - 1] = std::sqrt(4.0 * k * (k + a) * (k + b) * (k + a + b) /
                                  (s * s * (s + 1.0) * (s - 1.0)));
        }
    }
    return golub_welsch(al, be, mu0);
}

} // namespace

const GaussRule& gauss_legendre01(int m) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    GaussRule r = gauss_jacobi_pm1(m, 0.0, 0.0, 1.0); // mu0 already in [0,1] scale
    for (auto& x : r.nodes) x = 0.5 * (1.0 + x);
    auto [ins, ok] = cache.emplace(m, std::move(r));
    return ins->second;
}

GaussRule gauss_jacobi01(int m, double t) {
    if (!(t > -1.0)) throw std::domain_error("gauss_jacobi01: need t > -1");
    // mu0 in [0,1] variables: int_0^1 (1-u)^t du = 1/(t+1); weights then carry the
    // full weighted mass with no 2^(t+1) overflow for large t.
    GaussRule r = gauss_jacobi_pm1(m, t, 0.0, 1.0 / (t + 1.0));
    // node map u = (1+x)/2 so that 1-u = (1-x)/2 matches the (1-x)^t weight side
    for (auto& x : r.nodes) x = 0.5 * (1.0 + x);
    return r;
}

double refine_to_tolerance(const std::function<double(int)>& value_at_order,
                           int order0, int max_order, double rel_tol,
                           const char* context, double* achieved) {
    double prev = value_at_order(order0);
    double best_err = std::numeric_limits<double>::infinity();
    for (int m = 2 * order0; m <= max_order; m *= 2) {
        const double cur = value_at_order(m);
        const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        const double err = std::abs(cur - prev) / scale;
        prev = cur;
        best_err = err;
        if (err <= rel_tol) {
            if (achieved) *achieved = err;
            return cur;
        }
    }
    if (achieved) {
        *achieved = best_err;
        return prev;
    }
    throw QuadratureError(context, best_err, rel_tol);
}

} // namespace balltrace
