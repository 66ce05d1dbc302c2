#include "wgmfem/checks.hpp"

#include <cmath>
#include <random>

namespace wgmfem {

namespace {

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

/// Vector field with polynomial components in global coordinates.
struct PolyField {
    int degree = 0;
    std::vector<std::array<int, 2>> exps;
    Eigen::VectorXd cx, cy;

    PolyField(int d, std::mt19937_64& rng) : degree(d)
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int t = 0; t <= d; ++t)
            for (int a = t; a >= 0; --a)
                exps.push_back({a, t - a});
        cx.resize(exps.size());
        cy.resize(exps.size());
        for (std::size_t i = 0; i < exps.size(); ++i) {
            cx[i] = u(rng);
            cy[i] = u(rng);
        }
    }

    Vec2 value(const Point& p) const
    {
        Vec2 v = Vec2::Zero();
        for (std::size_t i = 0; i < exps.size(); ++i) {
            const double m = std::pow(p.x(), exps[i][0]) * std::pow(p.y(), exps[i][1]);
            v += m * Vec2(cx[i], cy[i]);
        }
        return v;
    }

    double divergence(const Point& p) const
    {
        double d = 0.0;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            const auto [a, b] = exps[i];
            if (a > 0)
                d += cx[i] * a * std::pow(p.x(), a - 1) * std::pow(p.y(), b);
            if (b > 0)
                d += cy[i] * b * std::pow(p.x(), a) * std::pow(p.y(), b - 1);
        }
        return d;
    }
};

} // namespace

double quadrature_exactness_defect(int max_order)
{
    double worst = 0.0;
    const std::array<Point, 4> square{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
    for (int order = 0; order <= max_order; ++order) {
        const auto tri = triangle_quadrature(Point(0, 0), Point(1, 0), Point(0, 1), order);
        const auto sq = cell_quadrature(square, order);
        const auto seg = edge_quadrature(Point(0, 0), Point(1, 0), order);
        for (int a = 0; a <= order; ++a) {
            for (int b = 0; a + b <= order; ++b) {
                auto mono = [a, b](const Point& p) { return std::pow(p.x(), a) * std::pow(p.y(), b); };
                worst = std::max(worst, rel_err(tri.integrate(mono), factorial(a) * factorial(b) / factorial(a + b + 2)));
                worst = std::max(worst, rel_err(sq.integrate(mono), 1.0 / ((a + 1.0) * (b + 1.0))));
            }
            worst = std::max(worst, rel_err(seg.integrate([a](const Point& p) { return std::pow(p.x(), a); }), 1.0 / (a + 1.0)));
        }
    }
    return worst;
}

double commutativity_defect(const PolyMesh& mesh, int k, int samples, std::uint64_t seed)
{
    const Spaces sp = Spaces::from_degree(k);
    const int order = 2 * k + 2;
    std::mt19937_64 rng(seed);
    std::vector<PolyField> fields;
    for (int s = 0; s < samples; ++s)
        fields.emplace_back(k + 1, rng);

    double worst = 0.0;
    for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
        const CellOperator op(mesh, c, sp, order);
        const Eigen::LLT<Eigen::MatrixXd> mb(op.mass_beta());
        for (const auto& v : fields) {
            Eigen::VectorXd dofs(op.local_size());
            dofs.head(op.n_alpha()) = l2_project_cell([&](const Point& x) { return v.value(x).x(); }, mesh, c, sp.alpha);
            dofs.segment(op.n_alpha(), op.n_alpha())
                = l2_project_cell([&](const Point& x) { return v.value(x).y(); }, mesh, c, sp.alpha);
            for (int j = 0; j < op.num_edges(); ++j) {
                const Edge& e = mesh.edge(op.cell_edge(j).edge);
                dofs.segment(op.edge_offset(j), op.n_edge()) = l2_project_edge_normal(
                    [&](const Point& x) { return v.value(x); }, mesh.vertex(e.v0), mesh.vertex(e.v1), e.normal, sp.beta, order);
            }
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.n_beta());
            const auto& q = op.quadrature();
            for (std::size_t i = 0; i < q.size(); ++i)
                rhs += q.weights[i] * v.divergence(q.points[i]) * op.basis_beta().eval(q.points[i]);
            const Eigen::VectorXd d = weak_divergence(op, dofs) - mb.solve(rhs);
            worst = std::max(worst, std::sqrt(std::max(0.0, d.dot(op.mass_beta() * d))));
        }
    }
    return worst;
}

double taylor_trick_deviation(const PolyMesh& mesh, const InterfaceCurve& curve, int max_m, int count, std::uint64_t seed,
                              bool disable_pullback)
{
    const auto& iface = mesh.interface_edges();
    if (iface.empty())
        throw Error("taylor_trick_deviation: mesh has no interface edges");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick_m(1, max_m);
    double worst = 0.0;
    for (int s = 0; s < count; ++s) {
        const auto& ie = iface[static_cast<std::size_t>(s) % iface.size()];
        const int m = pick_m(rng);
        const int degree = std::uniform_int_distribution<int>(0, m)(rng);
        const int cell = (s % 2 == 0) ? ie.cell1 : ie.cell2;
        const ScaledMonomialBasis basis(mesh.cell_centroid(cell), mesh.cell_diameter(cell), degree);
        Eigen::VectorXd coeffs(basis.dim());
        for (int i = 0; i < basis.dim(); ++i)
            coeffs[i] = u(rng);
        const Edge& e = mesh.edge(ie.edge);
        const auto q = edge_quadrature(mesh.vertex(e.v0), mesh.vertex(e.v1), 2 * max_m + 4);
        for (const auto& x : q.points) {
            const ProjectionData pd = project_to_interface(x, curve);
            const Point ref_point = disable_pullback ? x : pd.foot;
            const double at_ref = basis.eval(ref_point).dot(coeffs);
            const double at_x = basis.eval(x).dot(coeffs);
            const double t = taylor_correct(basis, coeffs, x, pd, m, TaylorVariant::T, TaylorMode::Explicit);
            const double t1 = taylor_correct(basis, coeffs, x, pd, m, TaylorVariant::T1, TaylorMode::Explicit);
            worst = std::max(worst, std::abs(t - at_ref));
            worst = std::max(worst, std::abs(t1 - (at_ref - at_x)));
        }
    }
    return worst;
}

double projection_orthogonality_defect(const PolyMesh& mesh, int degree)
{
    auto f = [](const Point& x) { return std::sin(3.0 * x.x() + 1.0) * std::cos(2.0 * x.y()); };
    double worst = 0.0;
    for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
        const Eigen::VectorXd coeffs = l2_project_cell(f, mesh, c, degree);
        const ScaledMonomialBasis basis(mesh.cell_centroid(c), mesh.cell_diameter(c), degree);
        const auto q = cell_quadrature(mesh.cell_points(c), 2 * degree + 2);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(basis.dim());
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Eigen::VectorXd m = basis.eval(q.points[i]);
            r += q.weights[i] * (f(q.points[i]) - m.dot(coeffs)) * m;
        }
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

double circle_fit_slope(const std::vector<int>& n_values, std::vector<double>* max_delta)
{
    const Box box{-1.0, 1.0, -1.0, 1.0};
    const auto curve = InterfaceCurve::circle(Point::Zero(), 0.5);
    std::vector<double> h, d;
    for (int n : n_values) {
        const PolyMesh mesh = generate_fitted_tri_mesh(box, curve, n);
        h.push_back(box.width() / n);
        d.push_back(quality_report(mesh, curve, 6).max_delta);
    }
    if (max_delta)
        *max_delta = d;
    return loglog_slope(h, d);
}

PolyMesh perturb_mesh(const PolyMesh& mesh, const InterfaceCurve& curve, std::uint64_t seed, double fraction)
{
    const std::size_t nv = mesh.num_vertices();
    std::vector<double> shortest(nv, std::numeric_limits<double>::infinity());
    std::vector<char> fixed(nv, 0);
    for (const auto& e : mesh.edges()) {
        shortest[e.v0] = std::min(shortest[e.v0], e.length);
        shortest[e.v1] = std::min(shortest[e.v1], e.length);
        if (e.on_boundary())
            fixed[e.v0] = fixed[e.v1] = 1;
    }
    for (const auto& ie : mesh.interface_edges())
        fixed[mesh.edge(ie.edge).v0] = fixed[mesh.edge(ie.edge).v1] = 1;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point> moved = mesh.vertices();
    for (std::size_t v = 0; v < nv; ++v) {
        const Vec2 step(u(rng), u(rng));
        const double r = fraction * shortest[v];
        if (fixed[v] || distance_to_interface(moved[v], curve) < 2.0 * r)
            continue;
        moved[v] += r * step;
    }
    // Undo moves around cells that lost their orientation.
    for (int pass = 0; pass < 3; ++pass) {
        bool bad = false;
        for (const auto& cell : mesh.cells()) {
            std::vector<Point> pts;
            for (int v : cell)
                pts.push_back(moved[v]);
            if (!(polygon_area(pts) > 0.0)) {
                bad = true;
                for (int v : cell)
                    moved[v] = mesh.vertex(v);
            }
        }
        if (!bad)
            break;
    }
    return PolyMesh(std::move(moved), mesh.cells(), mesh.labels());
}

} // namespace wgmfem
