#pragma once

#include "wgmfem/solver.hpp"

#include <optional>
#include <ostream>
#include <string>

namespace wgmfem {

/// Value, gradient and Hessian of a scalar function of (x, y).
struct Jet2 {
    double v = 0.0;
    Vec2 g = Vec2::Zero();
    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();

    Jet2() = default;
    Jet2(double c) : v(c) {}
    static Jet2 x(double x0);
    static Jet2 y(double y0);
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, double s);
Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 pow(const Jet2& a, int n);

using PressureFormula = std::function<Jet2(const Jet2& x, const Jet2& y)>;

/// Exact solution given by one closed-form pressure per region.  Every field of side i is the
/// side-i formula evaluated anywhere, which is its natural extension across the interface.
struct ManufacturedCase {
    std::string name;
    Box domain;
    InterfaceCurve curve = InterfaceCurve::circle(Point::Zero(), 0.5);
    std::array<double, 2> kappa{1.0, 1.0};
    std::array<PressureFormula, 2> pressure;

    Jet2 pressure_jet(int side, const Point& x) const;
    double p(int side, const Point& x) const;
    /// u = -kappa_i grad p_i
    Vec2 u(int side, const Point& x) const;
    /// f = div u = -kappa_i Laplacian p_i
    double f(int side, const Point& x) const;
    /// p1 - p2 on the curve
    double g_D(const Point& x) const;
    /// (u1 - u2) . n on the curve
    double g_N(const Point& x) const;

    ProblemData problem_data() const;
};

/// Circular interface r = 1/2 in [-1, 1]^2.
ManufacturedCase example1_case(std::array<double, 2> kappa);
/// Wavy interface y = sin(3 pi x) / 20 in [0, 1] x [-1/2, 1/2].
ManufacturedCase example2_case(std::array<double, 2> kappa);
/// Straight interface x = 1/2 in [0, 1]^2, piecewise constant pressure (1, -1/2), zero velocity.
ManufacturedCase patch_case(std::array<double, 2> kappa);
/// Cosine pressures with zero normal flux on an arbitrary box and curve.
ManufacturedCase custom_case(const Box& domain, const InterfaceCurve& curve, std::array<double, 2> kappa);

/// Side-i field evaluated at any point (natural extension).
enum class Field { P, Ux, Uy, F };
double evaluate_extended(const ManufacturedCase& c, Field field, const Point& x, int side);

/// sqrt((Q_h u^E - u_h)^T A (Q_h u^E - u_h)).
double energy_error(const SaddleSystem& system, const PolyMesh& mesh, const Eigen::VectorXd& u_h,
                    const ManufacturedCase& c, int extra_order = 2);

/// L2(Omega_h) distance of the sigma-projection of p^E and p_h, both shifted to zero mean.
double pressure_error(const PolyMesh& mesh, const WgDofMap& dofs, const Eigen::VectorXd& p_h, const ManufacturedCase& c,
                      int extra_order = 2);

/// Integral of the discrete pressure over Omega_h.
double pressure_integral(const SaddleSystem& system, const Eigen::VectorXd& p_h);

/// order_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
std::vector<double> convergence_rates(const std::vector<double>& h, const std::vector<double>& errors);

struct ConvergenceRecord {
    std::vector<double> h, e_u, e_p;

    void add(double h_i, double eu, double ep);
    std::vector<double> order_u() const { return convergence_rates(h, e_u); }
    std::vector<double> order_p() const { return convergence_rates(h, e_p); }
    /// Columns h,e_u,order_u,e_p,order_p; the first row leaves the orders empty.
    void write_csv(std::ostream& os) const;
    /// Console table in the same layout.
    void write_table(std::ostream& os) const;
};

} // namespace wgmfem
