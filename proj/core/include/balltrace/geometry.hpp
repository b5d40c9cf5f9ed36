#pragma once

#include <Eigen/Dense>
#include <vector>

#include "balltrace/common.hpp"

namespace balltrace {

// Point of the closed unit ball in C^n with cached |z|^2. Operations that
// need an interior point treat |z| > 1 - kBoundaryTol as boundary.
class Point {
public:
    static constexpr double kBoundaryTol = 1e-12;

    explicit Point(std::vector<Complex> coords);
    Point(std::initializer_list<Complex> coords) : Point(std::vector<Complex>(coords)) {}

    int dim() const { return static_cast<int>(coords_.size()); }
    const std::vector<Complex>& coords() const { return coords_; }
    const Complex& operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
    double norm_sq() const { return norm_sq_; }
    bool interior() const { return norm_sq_ < 1.0 - kBoundaryTol; }

private:
    std::vector<Complex> coords_;
    double norm_sq_;
};

// Hermitian inner product <z,w> = sum_i z_i conj(w_i).
Complex inner(const Point& z, const Point& w);

// Involutive Mobius automorphism phi_z of the ball exchanging 0 and z.
class MobiusMap {
public:
    explicit MobiusMap(Point center);
    const Point& center() const { return center_; }

private:
    Point center_;
};

// phi_z(w) = (z - P_z w - (1-|z|^2)^{1/2} Q_z w) / (1 - <w,z>), where P_z is
// the projection onto span{z} and Q_z = I - P_z; phi_0 = -identity.
Point mobius_apply(const MobiusMap& map, const Point& w);

// A_z = (1-|z|^2) P_z + (1-|z|^2)^{1/2} Q_z, so that
// (1 - <w,z>)(z - phi_z(w)) = A_z w; identity at z = 0.
Eigen::MatrixXcd a_matrix(const Point& z);

// K^(t)(z,w) = (1 - <z,w>)^{-(n+1+t)}, principal branch; the Hardy kernel
// (t = -1) is (1 - <z,w>)^{-n}.
Complex bergman_kernel(int n, WeightParam t, const Point& z, const Point& w);

// rho(z,w) = |phi_z(w)| = |phi_w(z)|, a metric on the ball.
double pseudo_metric(const Point& z, const Point& w);

} // namespace balltrace
