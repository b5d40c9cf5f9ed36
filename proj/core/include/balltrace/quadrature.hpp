#pragma once

#include <functional>
#include <vector>

#include "balltrace/common.hpp"

namespace balltrace {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

// Gauss-Legendre rule on [0,1]; integrates f exactly for deg(f) <= 2m-1.
const GaussRule& gauss_legendre01(int m);

// Gauss-Jacobi rule for the weight (1-u)^t on [0,1]:
//   sum_i w_i f(u_i) ~ int_0^1 f(u) (1-u)^t du,  t > -1.
// Exact for polynomial f with deg(f) <= 2m-1.
GaussRule gauss_jacobi01(int m, double t);

// Adaptive order-doubling evaluation of a rule family. Returns the refined value;
// throws QuadratureError when the successive-difference estimate misses rel_tol.
double refine_to_tolerance(const std::function<double(int)>& value_at_order,
                           int order0, int max_order, double rel_tol,
                           const char* context, double* achieved = nullptr);

} // namespace balltrace
