#pragma once

#include <functional>
#include <vector>

#include "balltrace/common.hpp"

namespace balltrace {

// Sampled function phi:(0,1) -> [0,inf) with monotone cubic (Fritsch-Carlson)
// interpolation. The abscissa is transformed to x = log(s/(1-s)) so that a
// uniform internal grid clusters logarithmically at both endpoints, where the
// functions of interest behave like s^(-a) (1-s)^b; strictly positive samples
// are additionally interpolated in log-ordinate space, which makes pure power
// behavior exactly linear and keeps the interpolant positive.
class TabulatedFn {
public:
    TabulatedFn() = default;

    // Takes strictly increasing grid points in (0,1) and finite sample values.
    TabulatedFn(std::vector<double> grid, std::vector<double> values);

    // Samples f on the default logit-uniform grid.
    static TabulatedFn sample(const std::function<double(double)>& f,
                              int size = kDefaultGridSize, double edge = kDefaultEdge);

    static TabulatedFn constant(double c, int size = 17, double edge = kDefaultEdge);

    double operator()(double s) const;

    bool empty() const { return grid_.empty(); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

    // True when the samples were strictly positive and the interpolation runs
    // in log-ordinate space, so log_value() is available.
    bool log_form() const { return log_ordinate_; }
    double log_value(double s) const;

    // Evaluation parametrized by l = log(1-s). Near s = 1 the complement 1-s
    // carries the significant digits; forming s first and subtracting would
    // throw most of them away.
    double value_at_log1m(double l) const;
    double log_value_at_log1m(double l) const;

    // Exponent q of the power-law model phi ~ C (1-s)^q implied by the
    // interpolant at the upper grid edge (log_form tables only).
    double upper_tail_exponent() const { return log_ordinate_ ? -slope_.back() : 0.0; }

    // Grid resolution used for the function tables of the integral calculus.
    static constexpr int kDefaultGridSize = 512;
    static constexpr double kDefaultEdge = 1e-10;
    static constexpr int kInterpolationOrder = 3;

private:
    std::vector<double> grid_;    // s in (0,1), strictly increasing
    std::vector<double> values_;  // phi(s), finite
    std::vector<double> x_;       // logit(s)
    std::vector<double> y_;       // value or log(value)
    std::vector<double> slope_;   // Fritsch-Carlson derivatives dy/dx
    bool log_ordinate_ = false;

    void build();
    double transformed_x(double x) const;
};

} // namespace balltrace
