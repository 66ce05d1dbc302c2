#pragma once

// Independent closed forms and finite-difference checks for the manufactured cases.

#include "wgmfem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace oracle {

using namespace wgmfem;

inline double p_ex1(int side, double x, double y, std::array<double, 2> k)
{
    const double r2 = x * x + y * y;
    if (side == 1)
        return (0.75 * x - x * r2) * x * x * y * y * y / k[0];
    return std::pow(x * x - 1.0, 2) * std::pow(y * y - 1.0, 2) * std::pow(r2 - 0.25, 2) / k[1];
}

inline double p_ex2(int side, double x, double y, std::array<double, 2> k)
{
    constexpr double pi = std::numbers::pi;
    const double env = x * x * (x - 1.0) * (x - 1.0) * std::pow(y * y - 0.25, 2);
    if (side == 1)
        return env * std::sin(2.0 * pi * x) * std::sin(2.0 * pi * y) / k[0];
    return env * std::cos(pi * x) * std::sin(pi * y) / k[1];
}

using Pressure = double (*)(int, double, double, std::array<double, 2>);

struct FdReport {
    int points = 0;
    int failures = 0;
    double worst = 0.0; ///< largest |coded - oracle| / max(|oracle|, scale)
};

/// Compares p, u, f, g_D and g_N of the case with central differences (step 1e-6) of the
/// closed form at `count` random points, to relative 1e-6.
inline FdReport check_against_fd(const ManufacturedCase& c, Pressure p, unsigned seed, int count = 1000)
{
    constexpr double s = 1e-6, tol = 1e-6;
    FdReport r;
    auto check = [&](double got, double want, double scale) {
        const double rel = std::abs(got - want) / std::max(std::abs(want), scale);
        r.worst = std::max(r.worst, rel);
        r.failures += !(rel <= tol);
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(c.domain.xmin, c.domain.xmax), uy(c.domain.ymin, c.domain.ymax);
    for (int n = 0; n < count; ++n, ++r.points) {
        const Point x(ux(rng), uy(rng));
        for (int side : {1, 2}) {
            const double kap = c.kappa[side - 1];
            auto P = [&](double a, double b) { return p(side, a, b, c.kappa); };
            check(c.p(side, x), P(x.x(), x.y()), 1e-3 / kap);
            const Vec2 u_fd
                = -kap * Vec2(P(x.x() + s, x.y()) - P(x.x() - s, x.y()), P(x.x(), x.y() + s) - P(x.x(), x.y() - s)) / (2 * s);
            const Vec2 u = c.u(side, x);
            check(u.x(), u_fd.x(), 1.0);
            check(u.y(), u_fd.y(), 1.0);
            // f is the divergence of the coded u
            const double f_fd = (c.u(side, x + Vec2(s, 0)).x() - c.u(side, x - Vec2(s, 0)).x()
                                 + c.u(side, x + Vec2(0, s)).y() - c.u(side, x - Vec2(0, s)).y())
                              / (2 * s);
            check(c.f(side, x), f_fd, 1.0);
        }
        const Point foot = project_to_interface(x, c.curve).foot;
        check(c.g_D(foot), p(1, foot.x(), foot.y(), c.kappa) - p(2, foot.x(), foot.y(), c.kappa), 1e-3);
        const Vec2 nrm = true_normal(foot, c.curve);
        check(c.g_N(foot), (c.u(1, foot) - c.u(2, foot)).dot(nrm), 1.0);
    }
    return r;
}

/// Largest |u . n| over `count` random points of the outer boundary.
inline double max_boundary_flux(const ManufacturedCase& c, unsigned seed = 7, int count = 100)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> t(0.0, 1.0);
    const Box& b = c.domain;
    double worst = 0.0;
    for (int n = 0; n < count; ++n) {
        const double a = t(rng);
        Point x;
        Vec2 nrm;
        switch (n % 4) {
        case 0: x = Point(b.xmin, b.ymin + a * b.height()), nrm = Vec2(-1, 0); break;
        case 1: x = Point(b.xmax, b.ymin + a * b.height()), nrm = Vec2(1, 0); break;
        case 2: x = Point(b.xmin + a * b.width(), b.ymin), nrm = Vec2(0, -1); break;
        default: x = Point(b.xmin + a * b.width(), b.ymax), nrm = Vec2(0, 1); break;
        }
        worst = std::max(worst, std::abs(c.u(side_of(x, c.curve), x).dot(nrm)));
    }
    return worst;
}

} // namespace oracle
