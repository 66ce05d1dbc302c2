#include "wgmfem/polynomial.hpp"

#include <cmath>

namespace wgmfem {

ScaledMonomialBasis::ScaledMonomialBasis(Point center, double scale, int degree)
    : center_(std::move(center)), scale_(scale), degree_(degree)
{
    if (degree < 0)
        throw Error("ScaledMonomialBasis: negative degree");
    if (!(scale > 0.0))
        throw Error("ScaledMonomialBasis: scale must be positive");
    for (int t = 0; t <= degree; ++t)
        for (int a = t; a >= 0; --a)
            exps_.push_back({a, t - a});
}

void ScaledMonomialBasis::eval(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const
{
    const double u = (x.x() - center_.x()) / scale_;
    const double v = (x.y() - center_.y()) / scale_;
    out[0] = 1.0;
    // Degree t row from degree t-1: multiply by u, and the last one by v.
    for (int t = 1; t <= degree_; ++t) {
        const int prev = t * (t - 1) / 2;
        const int cur = t * (t + 1) / 2;
        for (int i = 0; i < t; ++i)
            out[cur + i] = out[prev + i] * u;
        out[cur + t] = out[prev + t - 1] * v;
    }
}

Eigen::VectorXd ScaledMonomialBasis::eval(const Point& x) const
{
    Eigen::VectorXd out(dim());
    eval(x, out);
    return out;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> ScaledMonomialBasis::grad(const Point& x) const
{
    Eigen::Matrix<double, 2, Eigen::Dynamic> g = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, dim());
    if (degree_ == 0)
        return g;
    const ScaledMonomialBasis lower(center_, scale_, degree_ - 1);
    const Eigen::VectorXd m = lower.eval(x);
    for (int j = 0; j < dim(); ++j) {
        const auto [a, b] = exps_[j];
        if (a > 0)
            g(0, j) = a * m[monomial_index(a - 1, b)] / scale_;
        if (b > 0)
            g(1, j) = b * m[monomial_index(a, b - 1)] / scale_;
    }
    return g;
}

Eigen::MatrixXd ScaledMonomialBasis::dx_matrix() const
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim(), dim());
    for (int j = 0; j < dim(); ++j) {
        const auto [a, b] = exps_[j];
        if (a > 0)
            d(monomial_index(a - 1, b), j) = a / scale_;
    }
    return d;
}

Eigen::MatrixXd ScaledMonomialBasis::dy_matrix() const
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim(), dim());
    for (int j = 0; j < dim(); ++j) {
        const auto [a, b] = exps_[j];
        if (b > 0)
            d(monomial_index(a, b - 1), j) = b / scale_;
    }
    return d;
}

EdgeBasis::EdgeBasis(Point a, Point b, int degree) : a_(std::move(a)), degree_(degree)
{
    if (degree < 0)
        throw Error("EdgeBasis: negative degree");
    const Vec2 d = b - a_;
    length_ = d.norm();
    if (!(length_ > 0.0))
        throw GeometryError("EdgeBasis: zero-length edge");
    t_ = d / length_;
}

void EdgeBasis::eval(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const
{
    const double s = 2.0 * (x - a_).dot(t_) / length_ - 1.0;
    double p0 = 1.0, p1 = s;
    for (int l = 0; l <= degree_; ++l) {
        double pl;
        if (l == 0) {
            pl = 1.0;
        } else if (l == 1) {
            pl = s;
        } else {
            pl = ((2.0 * l - 1.0) * s * p1 - (l - 1.0) * p0) / l;
            p0 = p1;
            p1 = pl;
        }
        out[l] = std::sqrt((2.0 * l + 1.0) / length_) * pl;
    }
}

Eigen::VectorXd EdgeBasis::eval(const Point& x) const
{
    Eigen::VectorXd out(dim());
    eval(x, out);
    return out;
}

} // namespace wgmfem
