#include "balltrace/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace balltrace {

Point::Point(std::vector<Complex> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("Point: empty coordinate vector");
    norm_sq_ = 0.0;
    for (const Complex& c : coords_) norm_sq_ += std::norm(c);
    if (norm_sq_ > 1.0 + 1e-9) throw std::domain_error("Point: |z| exceeds 1");
}

Complex inner(const Point& z, const Point& w) {
    if (z.dim() != w.dim()) throw std::invalid_argument("inner: dimension mismatch");
    Complex acc = 0.0;
    for (int i = 0; i < z.dim(); ++i) acc += z[i] * std::conj(w[i]);
    return acc;
}

MobiusMap::MobiusMap(Point center) : center_(std::move(center)) {
    if (!center_.interior())
        throw std::domain_error("MobiusMap: center must be an interior point");
}

Point mobius_apply(const MobiusMap& map, const Point& w) {
    const Point& z = map.center();
    if (z.dim() != w.dim()) throw std::invalid_argument("mobius_apply: dimension mismatch");
    const int n = z.dim();
    const double zz = z.norm_sq();
    if (zz == 0.0) {
        std::vector<Complex> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = -w[i];
        return Point(std::move(out));
    }
    const Complex wz = inner(w, z);
    const Complex denom = 1.0 - wz;
    const double sz = std::sqrt(1.0 - zz);
    // P_z w = (<w,z>/|z|^2) z, Q_z w = w - P_z w
    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Complex p = (wz / zz) * z[i];
        const Complex q = w[i] - p;
        out[static_cast<std::size_t>(i)] = (z[i] - p - sz * q) / denom;
    }
    return Point(std::move(out));
}

Eigen::MatrixXcd a_matrix(const Point& z) {
    const int n = z.dim();
    const double zz = z.norm_sq();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
    if (zz == 0.0) return a;
    if (!z.interior()) throw std::domain_error("a_matrix: z must be interior");
    const double sz = std::sqrt(1.0 - zz);
    a *= sz;
    // add (1 - |z|^2 - (1-|z|^2)^{1/2}) on span{z} via the projection z z*/|z|^2
    const double extra = (1.0 - zz) - sz;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) += extra * z[i] * std::conj(z[j]) / zz;
    return a;
}

Complex bergman_kernel(int n, WeightParam t, const Point& z, const Point& w) {
    if (z.dim() != n || w.dim() != n)
        throw std::invalid_argument("bergman_kernel: dimension mismatch");
    const Complex d = 1.0 - inner(z, w);
    if (std::abs(d) < Point::kBoundaryTol)
        throw std::domain_error("bergman_kernel: kernel singular at <z,w> = 1");
    const double expo = t.hardy() ? static_cast<double>(n) : (n + 1.0 + t.t);
    return std::pow(d, -expo);
}

double pseudo_metric(const Point& z, const Point& w) {
    const Point& center = z.interior() ? z : w;
    const Point& arg = z.interior() ? w : z;
    if (!center.interior())
        throw std::domain_error("pseudo_metric: needs at least one interior point");
    const Point img = mobius_apply(MobiusMap(center), arg);
    return std::sqrt(img.norm_sq());
}

} // namespace balltrace
