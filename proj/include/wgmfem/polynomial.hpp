#pragma once

#include "wgmfem/geometry.hpp"

#include <array>
#include <vector>

namespace wgmfem {

/// dim P_d in two variables.
constexpr int poly_dim(int d) { return d < 0 ? 0 : (d + 1) * (d + 2) / 2; }

/// Graded-lex index of the monomial x^a y^b: 1, x, y, x^2, xy, y^2, ...
constexpr int monomial_index(int a, int b)
{
    const int t = a + b;
    return t * (t + 1) / 2 + (t - a);
}

/// m_j(x) = ((x - x_K) / h_K)^a ((y - y_K) / h_K)^b, a + b <= degree.
/// The ordering is hierarchical, so P_s is spanned by the first poly_dim(s) functions.
class ScaledMonomialBasis {
public:
    ScaledMonomialBasis() = default;
    ScaledMonomialBasis(Point center, double scale, int degree);

    int degree() const { return degree_; }
    int dim() const { return poly_dim(degree_); }
    const Point& center() const { return center_; }
    double scale() const { return scale_; }
    const std::array<int, 2>& exponents(int j) const { return exps_[j]; }

    Eigen::VectorXd eval(const Point& x) const;
    void eval(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const;
    /// Row 0: d/dx, row 1: d/dy.
    Eigen::Matrix<double, 2, Eigen::Dynamic> grad(const Point& x) const;

    /// Coefficient maps of d/dx and d/dy: coeffs(dp/dx) = dx_matrix() * coeffs(p).
    Eigen::MatrixXd dx_matrix() const;
    Eigen::MatrixXd dy_matrix() const;

private:
    Point center_ = Point::Zero();
    double scale_ = 1.0;
    int degree_ = 0;
    std::vector<std::array<int, 2>> exps_;
};

/// psi_l = sqrt((2l+1)/|e|) P_l(s), s in [-1, 1] running from a to b; L2(e)-orthonormal.
class EdgeBasis {
public:
    EdgeBasis() = default;
    EdgeBasis(Point a, Point b, int degree);

    int degree() const { return degree_; }
    int dim() const { return degree_ + 1; }
    double length() const { return length_; }

    Eigen::VectorXd eval(const Point& x) const;
    void eval(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const;

private:
    Point a_ = Point::Zero();
    Vec2 t_ = Vec2::UnitX();
    double length_ = 1.0;
    int degree_ = 0;
};

} // namespace wgmfem
