#include "wgmfem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace wgmfem {

namespace {

constexpr double pi = std::numbers::pi;

// Newton stopping rule on the parameter update, and the iteration cap.
constexpr double newton_tol = 1e-13;
constexpr int newton_max_iter = 50;

Vec2 rotate_clockwise(const Vec2& v) { return Vec2(v.y(), -v.x()); }

std::string format_point(const Point& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << p.x() << ", " << p.y() << ")";
    return os.str();
}

ProjectionData finish(const Point& x_h, const Point& foot, const Vec2& normal)
{
    ProjectionData pd;
    pd.foot = foot;
    pd.n_tilde = normal;
    const Vec2 d = foot - x_h;
    pd.delta = d.norm();
    pd.nu = pd.delta > 0.0 ? Vec2(d / pd.delta) : normal;
    return pd;
}

ProjectionData project_circle(const Point& x_h, const Circle& c)
{
    Vec2 r = x_h - c.center;
    const double len = r.norm();
    // The center is equidistant to every point; parameter 0 is the smallest angle.
    const Vec2 dir = len > 0.0 ? Vec2(r / len) : Vec2(1.0, 0.0);
    const Point foot = c.center + c.radius * dir;
    return finish(x_h, foot, dir);
}

ProjectionData project_segment(const Point& x_h, const Segment& s)
{
    const Vec2 ab = s.b - s.a;
    const double t = std::clamp((x_h - s.a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const Point foot = s.a + t * ab;
    return finish(x_h, foot, rotate_clockwise(ab).normalized());
}

ProjectionData project_graph(const Point& x_h, const SineGraph& g)
{
    const double x = x_h.x();
    const double y = x_h.y();
    auto dist2 = [&](double t) {
        const double dy = g.phi(t) - y;
        return (t - x) * (t - x) + dy * dy;
    };
    // Half of the derivative of dist2.
    auto stationarity = [&](double t) { return (t - x) + (g.phi(t) - y) * g.dphi(t); };
    auto stationarity_dt = [&](double t) {
        const double dp = g.dphi(t);
        return 1.0 + dp * dp + (g.phi(t) - y) * g.ddphi(t);
    };
    auto normal_at = [&](double t) { return Vec2(-g.dphi(t), 1.0).normalized(); };

    const double vertical = std::abs(y - g.phi(x));
    if (vertical == 0.0)
        return finish(x_h, Point(x, y), normal_at(x));

    // Any closer point satisfies |t - x| <= vertical distance.
    constexpr int samples = 32;
    const double lo_all = x - vertical;
    const double step = 2.0 * vertical / samples;
    int best = 0;
    double best_d = dist2(lo_all);
    for (int i = 1; i <= samples; ++i) {
        const double d = dist2(lo_all + i * step);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    const double lo = lo_all + std::max(best - 1, 0) * step;
    const double hi = lo_all + std::min(best + 1, samples) * step;

    double t = lo_all + best * step;
    bool converged = false;
    for (int it = 0; it < newton_max_iter; ++it) {
        const double dg = stationarity_dt(t);
        if (!(std::abs(dg) > 0.0))
            break;
        const double dt = stationarity(t) / dg;
        t -= dt;
        if (!(t >= lo && t <= hi))
            break;
        if (std::abs(dt) < newton_tol) {
            converged = true;
            break;
        }
    }

    if (!converged) {
        double a = lo, b = hi;
        double ga = stationarity(a), gb = stationarity(b);
        if (ga > 0.0 || gb < 0.0) {
            throw GeometryError("closest-point projection onto graph interface did not converge for point "
                                + format_point(x_h));
        }
        while (b - a > newton_tol) {
            const double m = 0.5 * (a + b);
            const double gm = stationarity(m);
            if (gm < 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        t = 0.5 * (a + b);
    }
    return finish(x_h, Point(t, g.phi(t)), normal_at(t));
}

} // namespace

double SineGraph::phi(double x) const { return amp * std::sin(freq * pi * x); }
double SineGraph::dphi(double x) const { return amp * freq * pi * std::cos(freq * pi * x); }
double SineGraph::ddphi(double x) const { return -amp * freq * freq * pi * pi * std::sin(freq * pi * x); }

InterfaceCurve::InterfaceCurve(Shape shape) : shape_(std::move(shape))
{
    if (const auto* c = std::get_if<Circle>(&shape_); c && !(c->radius > 0.0))
        throw GeometryError("circle interface requires a positive radius");
    if (const auto* s = std::get_if<Segment>(&shape_); s && (s->a - s->b).norm() == 0.0)
        throw GeometryError("segment interface requires distinct endpoints");
}

InterfaceCurve InterfaceCurve::circle(Point center, double radius) { return InterfaceCurve(Circle{center, radius}); }
InterfaceCurve InterfaceCurve::graph(double amp, double freq) { return InterfaceCurve(SineGraph{amp, freq}); }
InterfaceCurve InterfaceCurve::segment(Point a, Point b) { return InterfaceCurve(Segment{a, b}); }

std::string InterfaceCurve::kind() const
{
    if (is_circle())
        return "circle";
    if (is_graph())
        return "graph";
    return "segment";
}

double InterfaceCurve::level(const Point& x) const
{
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return (x - s.center).norm() - s.radius;
            } else if constexpr (std::is_same_v<T, SineGraph>) {
                return x.y() - s.phi(x.x());
            } else {
                const Vec2 n = rotate_clockwise(s.b - s.a).normalized();
                return (x - s.a).dot(n);
            }
        },
        shape_);
}

ProjectionData project_to_interface(const Point& x_h, const InterfaceCurve& curve)
{
    return std::visit(
        [&](const auto& s) -> ProjectionData {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return project_circle(x_h, s);
            } else if constexpr (std::is_same_v<T, SineGraph>) {
                return project_graph(x_h, s);
            } else {
                return project_segment(x_h, s);
            }
        },
        curve.shape());
}

Vec2 true_normal(const Point& p, const InterfaceCurve& curve)
{
    return std::visit(
        [&](const auto& s) -> Vec2 {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return (p - s.center).normalized();
            } else if constexpr (std::is_same_v<T, SineGraph>) {
                return Vec2(-s.dphi(p.x()), 1.0).normalized();
            } else {
                return rotate_clockwise(s.b - s.a).normalized();
            }
        },
        curve.shape());
}

double distance_to_interface(const Point& x, const InterfaceCurve& curve)
{
    return project_to_interface(x, curve).delta;
}

int side_of(const Point& x, const InterfaceCurve& curve)
{
    const double lv = curve.level(x);
    if (std::abs(lv) < 1e-10 && distance_to_interface(x, curve) <= 1e-14)
        throw GeometryError("point " + format_point(x)
                            + " lies on the interface; classify with a probe point off the curve");
    return lv < 0.0 ? 1 : 2;
}

} // namespace wgmfem
