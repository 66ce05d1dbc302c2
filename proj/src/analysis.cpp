#include "wgmfem/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace wgmfem {

Jet2 Jet2::x(double x0)
{
    Jet2 j(x0);
    j.g = Vec2(1.0, 0.0);
    return j;
}

Jet2 Jet2::y(double y0)
{
    Jet2 j(y0);
    j.g = Vec2(0.0, 1.0);
    return j;
}

Jet2 operator+(const Jet2& a, const Jet2& b)
{
    Jet2 r;
    r.v = a.v + b.v;
    r.g = a.g + b.g;
    r.H = a.H + b.H;
    return r;
}

Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }

Jet2 operator-(const Jet2& a)
{
    Jet2 r;
    r.v = -a.v;
    r.g = -a.g;
    r.H = -a.H;
    return r;
}

Jet2 operator*(const Jet2& a, const Jet2& b)
{
    Jet2 r;
    r.v = a.v * b.v;
    r.g = a.v * b.g + b.v * a.g;
    r.H = a.v * b.H + b.v * a.H + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
}

Jet2 operator/(const Jet2& a, double s) { return a * Jet2(1.0 / s); }

Jet2 sin(const Jet2& a)
{
    Jet2 r;
    const double s = std::sin(a.v), c = std::cos(a.v);
    r.v = s;
    r.g = c * a.g;
    r.H = c * a.H - s * a.g * a.g.transpose();
    return r;
}

Jet2 cos(const Jet2& a)
{
    Jet2 r;
    const double s = std::sin(a.v), c = std::cos(a.v);
    r.v = c;
    r.g = -s * a.g;
    r.H = -s * a.H - c * a.g * a.g.transpose();
    return r;
}

Jet2 pow(const Jet2& a, int n)
{
    if (n < 0)
        throw Error("Jet2 pow: negative exponent");
    Jet2 r(1.0);
    for (int i = 0; i < n; ++i)
        r = r * a;
    return r;
}

Jet2 ManufacturedCase::pressure_jet(int side, const Point& x) const
{
    if (side != 1 && side != 2)
        throw Error("manufactured case: side must be 1 or 2");
    return pressure[side - 1](Jet2::x(x.x()), Jet2::y(x.y()));
}

double ManufacturedCase::p(int side, const Point& x) const { return pressure_jet(side, x).v; }

Vec2 ManufacturedCase::u(int side, const Point& x) const { return -kappa[side - 1] * pressure_jet(side, x).g; }

double ManufacturedCase::f(int side, const Point& x) const { return -kappa[side - 1] * pressure_jet(side, x).H.trace(); }

double ManufacturedCase::g_D(const Point& x) const { return p(1, x) - p(2, x); }

double ManufacturedCase::g_N(const Point& x) const { return (u(1, x) - u(2, x)).dot(true_normal(x, curve)); }

ProblemData ManufacturedCase::problem_data() const
{
    ProblemData d;
    d.kappa = kappa;
    d.f = [this](int side, const Point& x) { return f(side, x); };
    d.g_D = [this](const Point& x) { return g_D(x); };
    d.g_N = [this](const Point& x) { return g_N(x); };
    return d;
}

ManufacturedCase example1_case(std::array<double, 2> kappa)
{
    ManufacturedCase c;
    c.name = "example1";
    c.domain = Box{-1.0, 1.0, -1.0, 1.0};
    c.curve = InterfaceCurve::circle(Point::Zero(), 0.5);
    c.kappa = kappa;
    const double k1 = kappa[0], k2 = kappa[1];
    c.pressure[0] = [k1](const Jet2& x, const Jet2& y) {
        return (0.75 * x - x * (x * x + y * y)) * x * x * pow(y, 3) / k1;
    };
    c.pressure[1] = [k2](const Jet2& x, const Jet2& y) {
        return pow(x * x - 1.0, 2) * pow(y * y - 1.0, 2) * pow(x * x + y * y - 0.25, 2) / k2;
    };
    return c;
}

ManufacturedCase example2_case(std::array<double, 2> kappa)
{
    constexpr double pi = std::numbers::pi;
    ManufacturedCase c;
    c.name = "example2";
    c.domain = Box{0.0, 1.0, -0.5, 0.5};
    c.curve = InterfaceCurve::graph(0.05, 3.0);
    c.kappa = kappa;
    const double k1 = kappa[0], k2 = kappa[1];
    auto envelope = [](const Jet2& x, const Jet2& y) { return x * x * pow(x - 1.0, 2) * pow(y * y - 0.25, 2); };
    c.pressure[0] = [=](const Jet2& x, const Jet2& y) {
        return envelope(x, y) * sin(2.0 * pi * x) * sin(2.0 * pi * y) / k1;
    };
    c.pressure[1] = [=](const Jet2& x, const Jet2& y) { return envelope(x, y) * cos(pi * x) * sin(pi * y) / k2; };
    return c;
}

ManufacturedCase patch_case(std::array<double, 2> kappa)
{
    ManufacturedCase c;
    c.name = "patch";
    c.domain = Box{0.0, 1.0, 0.0, 1.0};
    c.curve = InterfaceCurve::segment(Point(0.5, 0.0), Point(0.5, 1.0));
    c.kappa = kappa;
    c.pressure[0] = [](const Jet2&, const Jet2&) { return Jet2(1.0); };
    c.pressure[1] = [](const Jet2&, const Jet2&) { return Jet2(-0.5); };
    return c;
}

ManufacturedCase custom_case(const Box& domain, const InterfaceCurve& curve, std::array<double, 2> kappa)
{
    constexpr double pi = std::numbers::pi;
    ManufacturedCase c;
    c.name = "custom";
    c.domain = domain;
    c.curve = curve;
    c.kappa = kappa;
    const double k1 = kappa[0], k2 = kappa[1];
    const Box b = domain;
    auto X = [b](const Jet2& x) { return (x - b.xmin) / b.width(); };
    auto Y = [b](const Jet2& y) { return (y - b.ymin) / b.height(); };
    c.pressure[0] = [=](const Jet2& x, const Jet2& y) { return cos(pi * X(x)) * cos(pi * Y(y)) / k1; };
    c.pressure[1] = [=](const Jet2& x, const Jet2& y) { return cos(2.0 * pi * X(x)) * cos(pi * Y(y)) / k2; };
    return c;
}

double evaluate_extended(const ManufacturedCase& c, Field field, const Point& x, int side)
{
    switch (field) {
    case Field::P:
        return c.p(side, x);
    case Field::Ux:
        return c.u(side, x).x();
    case Field::Uy:
        return c.u(side, x).y();
    case Field::F:
        return c.f(side, x);
    }
    throw Error("evaluate_extended: unknown field");
}

double energy_error(const SaddleSystem& system, const PolyMesh& mesh, const Eigen::VectorXd& u_h, const ManufacturedCase& c,
                    int extra_order)
{
    if (u_h.size() != system.n_u() || static_cast<int>(mesh.num_cells()) != system.dofs.num_cells())
        throw Error("energy_error: solution does not match the mesh and spaces");
    const Eigen::VectorXd qu
        = project_wg([&](int side, const Point& x) { return c.u(side, x); }, mesh, system.dofs, extra_order);
    const Eigen::VectorXd d = qu - u_h;
    return std::sqrt(std::max(0.0, d.dot(system.A * d)));
}

double pressure_error(const PolyMesh& mesh, const WgDofMap& dofs, const Eigen::VectorXd& p_h, const ManufacturedCase& c,
                      int extra_order)
{
    if (p_h.size() != dofs.n_p() || static_cast<int>(mesh.num_cells()) != dofs.num_cells())
        throw Error("pressure_error: solution does not match the mesh and spaces");
    const int sigma = dofs.spaces().sigma;
    const int ns = dofs.n_sigma();
    const int order = 2 * sigma + 2 + extra_order;
    const int nc = static_cast<int>(mesh.num_cells());

    // Per cell: coefficients of d = Q p^E - p_h and the integrals of the basis.
    std::vector<Eigen::VectorXd> diff(nc);
    std::vector<Eigen::MatrixXd> mass(nc);
    double integral = 0.0, area = 0.0;
    for (int k = 0; k < nc; ++k) {
        const int side = mesh.label(k);
        diff[k] = l2_project_cell([&](const Point& x) { return c.p(side, x); }, mesh, k, sigma, extra_order)
                  - p_h.segment(dofs.cell_p_offset(k), ns);
        const ScaledMonomialBasis basis(mesh.cell_centroid(k), mesh.cell_diameter(k), sigma);
        mass[k] = mass_matrix(basis, cell_quadrature(mesh.cell_points(k), order));
        integral += mass[k].col(0).dot(diff[k]);
        area += mesh.cell_area(k);
    }
    const double mean = integral / area;
    double err2 = 0.0;
    for (int k = 0; k < nc; ++k) {
        Eigen::VectorXd d = diff[k];
        d[0] -= mean;
        err2 += d.dot(mass[k] * d);
    }
    return std::sqrt(std::max(0.0, err2));
}

double pressure_integral(const SaddleSystem& system, const Eigen::VectorXd& p_h) { return system.c.dot(p_h); }

std::vector<double> convergence_rates(const std::vector<double>& h, const std::vector<double>& errors)
{
    if (h.size() != errors.size() || h.size() < 2)
        throw Error("convergence_rates: need at least two levels");
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
        if (!(errors[i] > 0.0) || !(errors[i + 1] > 0.0))
            throw Error("convergence_rates: errors must be positive");
        if (!(h[i] > h[i + 1]) || !(h[i + 1] > 0.0))
            throw Error("convergence_rates: mesh sizes must be positive and strictly decreasing");
        out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]));
    }
    return out;
}

void ConvergenceRecord::add(double h_i, double eu, double ep)
{
    h.push_back(h_i);
    e_u.push_back(eu);
    e_p.push_back(ep);
}

namespace {

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Orders are only defined for positive errors; otherwise the cell stays empty.
std::vector<std::string> order_cells(const std::vector<double>& h, const std::vector<double>& e)
{
    std::vector<std::string> out(h.size());
    for (std::size_t i = 1; i < h.size(); ++i)
        if (e[i - 1] > 0.0 && e[i] > 0.0)
            out[i] = fmt("%.2f", std::log(e[i - 1] / e[i]) / std::log(h[i - 1] / h[i]));
    return out;
}

std::string h_label(double h)
{
    const double inv = 1.0 / h;
    if (std::abs(inv - std::round(inv)) < 1e-9)
        return "1/" + std::to_string(static_cast<long>(std::round(inv)));
    return fmt("%.4g", h);
}

} // namespace

void ConvergenceRecord::write_csv(std::ostream& os) const
{
    const auto ou = order_cells(h, e_u);
    const auto op = order_cells(h, e_p);
    os << "h,e_u,order_u,e_p,order_p\n";
    for (std::size_t i = 0; i < h.size(); ++i)
        os << fmt("%.10g", h[i]) << "," << fmt("%.6e", e_u[i]) << "," << ou[i] << "," << fmt("%.6e", e_p[i]) << "," << op[i]
           << "\n";
}

void ConvergenceRecord::write_table(std::ostream& os) const
{
    const auto ou = order_cells(h, e_u);
    const auto op = order_cells(h, e_p);
    char line[160];
    std::snprintf(line, sizeof line, "%8s  %12s  %6s  %12s  %6s\n", "h", "|e_u|_0,h", "order", "|e_p|_0", "order");
    os << line;
    for (std::size_t i = 0; i < h.size(); ++i) {
        std::snprintf(line, sizeof line, "%8s  %12.2e  %6s  %12.2e  %6s\n", h_label(h[i]).c_str(), e_u[i],
                      i == 0 ? "--" : ou[i].c_str(), e_p[i], i == 0 ? "--" : op[i].c_str());
        os << line;
    }
}

} // namespace wgmfem
