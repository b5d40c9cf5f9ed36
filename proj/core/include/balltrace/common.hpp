#pragma once

#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace balltrace {

namespace detail {
inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}
} // namespace detail

using Real = double;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Weight exponent t of the measure c_t (1-|z|^2)^t dm on the unit ball.
// t = -1 designates the Hardy space on the sphere (limit case).
struct WeightParam {
    double t;
    constexpr WeightParam(double t_ = 0.0) : t(t_) {
        if (t < -1.0) throw std::domain_error("WeightParam: t must satisfy t >= -1");
    }
    constexpr bool hardy() const { return t == -1.0; }
    constexpr operator double() const { return t; }
};

// Raised when an adaptive quadrature cannot reach its error target.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& context, double achieved, double target)
        : std::runtime_error(context + ": quadrature did not converge, achieved error " +
                             detail::sci(achieved) + ", target " + detail::sci(target)),
          achieved_error(achieved), target_error(target) {}
    double achieved_error;
    double target_error;
};

// Raised on malformed experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a run would exceed the configured truncation budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace balltrace
