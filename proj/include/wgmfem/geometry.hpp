#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <variant>

namespace wgmfem {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Box {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    bool contains(const Point& p, double tol = 1e-12) const
    {
        return p.x() >= xmin - tol && p.x() <= xmax + tol && p.y() >= ymin - tol && p.y() <= ymax + tol;
    }
};

struct Circle {
    Point center = Point::Zero();
    double radius = 0.5;
};

/// Graph interface y = amp * sin(freq * pi * x).  Region 1 lies below the curve.
struct SineGraph {
    double amp = 0.05;
    double freq = 3.0;

    double phi(double x) const;
    double dphi(double x) const;
    double ddphi(double x) const;
};

/// Straight interface through a and b.  Region 1 lies to the left of a -> b.
struct Segment {
    Point a = Point(0.5, 0.0);
    Point b = Point(0.5, 1.0);
};

/// The physical interface.  Its normal always points from region 1 to region 2.
class InterfaceCurve {
public:
    using Shape = std::variant<Circle, SineGraph, Segment>;

    InterfaceCurve(Shape shape);

    static InterfaceCurve circle(Point center, double radius);
    static InterfaceCurve graph(double amp, double freq);
    static InterfaceCurve segment(Point a, Point b);

    const Shape& shape() const { return shape_; }
    bool is_circle() const { return std::holds_alternative<Circle>(shape_); }
    bool is_graph() const { return std::holds_alternative<SineGraph>(shape_); }
    bool is_segment() const { return std::holds_alternative<Segment>(shape_); }
    std::string kind() const;

    /// Signed level function: negative in region 1, positive in region 2, zero on the curve.
    /// Not a distance in general (graph case uses y - phi(x)).
    double level(const Point& x) const;

private:
    Shape shape_;
};

/// Closest-point data of a point x_h with respect to the interface.
struct ProjectionData {
    Point foot;      ///< closest point on the curve
    double delta;    ///< |foot - x_h|
    Vec2 nu;         ///< unit direction x_h -> foot (true normal when delta == 0)
    Vec2 n_tilde;    ///< true unit normal at foot, region 1 -> region 2
};

/// Closest-point projection onto the curve.  Ties resolve to the smallest curve parameter.
ProjectionData project_to_interface(const Point& x_h, const InterfaceCurve& curve);

/// Unit normal at a point of the curve, oriented from region 1 to region 2.
Vec2 true_normal(const Point& p, const InterfaceCurve& curve);

/// Region label (1 or 2) of a point that is not on the curve.
int side_of(const Point& x, const InterfaceCurve& curve);

/// Euclidean distance from x to the curve.
double distance_to_interface(const Point& x, const InterfaceCurve& curve);

} // namespace wgmfem
