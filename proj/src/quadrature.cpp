#include "wgmfem/quadrature.hpp"

#include "wgmfem/mesh.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace wgmfem {

namespace {

std::vector<std::pair<double, double>> compute_gauss_legendre(int n)
{
    std::vector<std::pair<double, double>> rule(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = {-x, w};
        rule[n - 1 - i] = {x, w};
    }
    if (n % 2 == 1)
        rule[n / 2].first = 0.0;
    return rule;
}

} // namespace

std::vector<std::pair<double, double>> gauss_legendre(int n)
{
    if (n < 1)
        throw Error("gauss_legendre: need at least one point");
    static std::mutex mutex;
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int order)
{
    // (s, t) in [0,1]^2 -> a + s (b - a) + s t (c - b); Jacobian 2|T| s.
    const int n = std::max(1, (order + 3) / 2);
    const auto gl = gauss_legendre(n);
    const double twice_area = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    QuadratureRule q;
    q.order = order;
    q.points.reserve(n * n);
    q.weights.reserve(n * n);
    for (const auto& [xs, ws] : gl) {
        const double s = 0.5 * (xs + 1.0);
        for (const auto& [xt, wt] : gl) {
            const double t = 0.5 * (xt + 1.0);
            q.points.push_back(a + s * (b - a) + s * t * (c - b));
            q.weights.push_back(0.25 * ws * wt * twice_area * s);
        }
    }
    return q;
}

QuadratureRule cell_quadrature(std::span<const Point> polygon, int order)
{
    if (polygon.size() < 3)
        throw GeometryError("cell_quadrature: polygon needs at least three vertices");
    if (polygon.size() == 3)
        return triangle_quadrature(polygon[0], polygon[1], polygon[2], order);

    const Point c = polygon_centroid(polygon);
    QuadratureRule q;
    q.order = order;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point& p0 = polygon[i];
        const Point& p1 = polygon[(i + 1) % polygon.size()];
        const double cross = (p0 - c).x() * (p1 - c).y() - (p0 - c).y() * (p1 - c).x();
        if (!(cross > 0.0))
            throw GeometryError("cell_quadrature: polygon is not star-shaped about its centroid");
        auto sub = triangle_quadrature(c, p0, p1, order);
        q.points.insert(q.points.end(), sub.points.begin(), sub.points.end());
        q.weights.insert(q.weights.end(), sub.weights.begin(), sub.weights.end());
    }
    return q;
}

QuadratureRule edge_quadrature(const Point& a, const Point& b, int order)
{
    const double len = (b - a).norm();
    if (!(len > 0.0))
        throw GeometryError("edge_quadrature: zero-length edge");
    const int n = std::max(1, (order + 2) / 2);
    QuadratureRule q;
    q.order = order;
    for (const auto& [x, w] : gauss_legendre(n)) {
        q.points.push_back(a + 0.5 * (x + 1.0) * (b - a));
        q.weights.push_back(0.5 * w * len);
    }
    return q;
}

} // namespace wgmfem
