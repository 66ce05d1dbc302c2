#pragma once

#include "wgmfem/geometry.hpp"

#include <span>
#include <utility>
#include <vector>

namespace wgmfem {

/// Points and positive weights; weights sum to the measure of the domain.
struct QuadratureRule {
    std::vector<Point> points;
    std::vector<double> weights;
    int order = 0;

    std::size_t size() const { return points.size(); }

    template <typename F>
    auto integrate(F&& f) const
    {
        using R = std::decay_t<decltype(f(points[0]))>;
        R sum = weights[0] * f(points[0]);
        for (std::size_t i = 1; i < points.size(); ++i)
            sum += weights[i] * f(points[i]);
        return sum;
    }
};

/// Gauss-Legendre nodes and weights on [-1, 1], exact to degree 2 n - 1.
std::vector<std::pair<double, double>> gauss_legendre(int n);

/// Collapsed Gauss rule on a triangle, exact to `order`.
QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int order);

/// Triangles are integrated directly; other polygons are fanned from their centroid.
/// Throws GeometryError when the polygon is not star-shaped with respect to its centroid.
QuadratureRule cell_quadrature(std::span<const Point> polygon, int order);

/// Gauss-Legendre rule on a segment, exact to `order`.
QuadratureRule edge_quadrature(const Point& a, const Point& b, int order);

} // namespace wgmfem
