#include "balltrace/tabulated.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace balltrace {

namespace {

double logit(double s) { return std::log(s / (1.0 - s)); }

// Derivative of the Lagrange interpolant through points [lo, hi] at node i.
double lagrange_deriv(const std::vector<double>& x, const std::vector<double>& y,
                      std::size_t lo, std::size_t hi, std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) {
            double s = 0.0;
            for (std::size_t k = lo; k <= hi; ++k)
                if (k != i) s += 1.0 / (x[i] - x[k]);
            acc += y[i] * s;
        } else {
            double p = 1.0 / (x[j] - x[i]);
            for (std::size_t k = lo; k <= hi; ++k) {
                if (k == j || k == i) continue;
                p *= (x[i] - x[k]) / (x[j] - x[k]);
            }
            acc += y[j] * p;
        }
    }
    return acc;
}

// Slopes from a five-point stencil, then clipped into the Fritsch-Carlson
// monotone region |d| <= 3 min(adjacent secants). High order where the data
// is smooth, shape-preserving everywhere.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n == 1) return d;
    std::vector<double> sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    if (n == 2) {
        d[0] = d[1] = sec[0];
        return d;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = (i >= 2) ? i - 2 : 0;
        std::size_t hi = std::min(n - 1, lo + 4);
        lo = (hi >= 4) ? hi - 4 : 0;
        double est = lagrange_deriv(x, y, lo, hi, i);
        const double sl = (i > 0) ? sec[i - 1] : sec[0];
        const double sr = (i + 1 < n) ? sec[i] : sec[n - 2];
        if (sl * sr <= 0.0 && i > 0 && i + 1 < n) {
            est = 0.0; // local extremum between the adjacent secants
        } else {
            const double ref = (i == 0) ? sr : (i + 1 == n ? sl : 0.0);
            const double cap = (i > 0 && i + 1 < n)
                                   ? 3.0 * std::min(std::abs(sl), std::abs(sr))
                                   : 3.0 * std::abs(ref);
            const double sign = (i > 0 && i + 1 < n) ? sl : ref;
            if (est * sign <= 0.0) est = 0.0;
            else if (std::abs(est) > cap) est = (est > 0.0 ? cap : -cap);
        }
        d[i] = est;
    }
    return d;
}

} // namespace

TabulatedFn::TabulatedFn(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() != values_.size() || grid_.empty())
        throw std::invalid_argument("TabulatedFn: grid/value size mismatch");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!(grid_[i] > 0.0 && grid_[i] < 1.0))
            throw std::invalid_argument("TabulatedFn: grid points must lie in (0,1)");
        if (i > 0 && !(grid_[i] > grid_[i - 1]))
            throw std::invalid_argument("TabulatedFn: grid must be strictly increasing");
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("TabulatedFn: values must be finite");
    }
    build();
}

void TabulatedFn::build() {
    const std::size_t n = grid_.size();
    x_.resize(n);
    for (std::size_t i = 0; i < n; ++i) x_[i] = logit(grid_[i]);
    log_ordinate_ = std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
    y_.resize(n);
    for (std::size_t i = 0; i < n; ++i) y_[i] = log_ordinate_ ? std::log(values_[i]) : values_[i];
    slope_ = monotone_slopes(x_, y_);
}

TabulatedFn TabulatedFn::sample(const std::function<double(double)>& f, int size, double edge) {
    if (size < 2) throw std::invalid_argument("TabulatedFn::sample: size < 2");
    const double x0 = logit(edge), x1 = logit(1.0 - edge);
    std::vector<double> grid(size), vals(size);
    for (int i = 0; i < size; ++i) {
        const double x = x0 + (x1 - x0) * i / (size - 1);
        const double s = 1.0 / (1.0 + std::exp(-x));
        grid[i] = s;
        vals[i] = f(s);
    }
    return TabulatedFn(std::move(grid), std::move(vals));
}

TabulatedFn TabulatedFn::constant(double c, int size, double edge) {
    return sample([c](double) { return c; }, size, edge);
}

double TabulatedFn::transformed_x(double x) const {
    if (grid_.empty()) throw std::logic_error("TabulatedFn: empty");
    double y;
    if (x <= x_.front()) {
        y = y_.front() + slope_.front() * (x - x_.front());  // power-law tail in logit space
    } else if (x >= x_.back()) {
        y = y_.back() + slope_.back() * (x - x_.back());
    } else {
        const std::size_t k =
            static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        const double h = x_[k + 1] - x_[k];
        const double u = (x - x_[k]) / h;
        const double u2 = u * u, u3 = u2 * u;
        y = (2.0 * u3 - 3.0 * u2 + 1.0) * y_[k] + (u3 - 2.0 * u2 + u) * h * slope_[k] +
            (-2.0 * u3 + 3.0 * u2) * y_[k + 1] + (u3 - u2) * h * slope_[k + 1];
    }
    return y;
}

namespace {

// logit coordinate from l = log(1-s): x = log(s) - log(1-s) = log1p(-e^l) - l
double x_from_log1m(double l) {
    if (!(l < 0.0)) throw std::domain_error("TabulatedFn: log(1-s) must be negative");
    return std::log1p(-std::exp(l)) - l;
}

double checked_logit(double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("TabulatedFn: argument outside (0,1)");
    return logit(s);
}

} // namespace

double TabulatedFn::operator()(double s) const {
    const double y = transformed_x(checked_logit(s));
    return log_ordinate_ ? std::exp(y) : y;
}

double TabulatedFn::log_value(double s) const {
    if (!log_ordinate_) throw std::logic_error("TabulatedFn: log_value requires positive samples");
    return transformed_x(checked_logit(s));
}

double TabulatedFn::value_at_log1m(double l) const {
    const double y = transformed_x(x_from_log1m(l));
    return log_ordinate_ ? std::exp(y) : y;
}

double TabulatedFn::log_value_at_log1m(double l) const {
    if (!log_ordinate_) throw std::logic_error("TabulatedFn: log_value requires positive samples");
    return transformed_x(x_from_log1m(l));
}

} // namespace balltrace
