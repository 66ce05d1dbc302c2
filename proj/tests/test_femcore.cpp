#include "wgmfem/checks.hpp"
#include "wgmfem/dofmap.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace wgmfem;

namespace {

const InterfaceCurve circle = InterfaceCurve::circle(Point::Zero(), 0.5);

PolyMesh unit_square_cell()
{
    return PolyMesh({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, {{0, 1, 2, 3}}, {1});
}

PolyMesh example1_mesh(int n = 16) { return generate_fitted_tri_mesh({-1, 1, -1, 1}, circle, n); }

// Local WG dofs of the projection of v on one cell.
Eigen::VectorXd local_projection(const CellOperator& op, const PolyMesh& m, const VectorField& v, int degree)
{
    Eigen::VectorXd d(op.local_size());
    d.head(op.n_alpha()) = l2_project_cell([&](const Point& x) { return v(x).x(); }, m, op.cell(), degree);
    d.segment(op.n_alpha(), op.n_alpha()) = l2_project_cell([&](const Point& x) { return v(x).y(); }, m, op.cell(), degree);
    for (int j = 0; j < op.num_edges(); ++j) {
        const Edge& e = m.edge(op.cell_edge(j).edge);
        d.segment(op.edge_offset(j), op.n_edge())
            = l2_project_edge_normal(v, m.vertex(e.v0), m.vertex(e.v1), e.normal, degree, 2 * degree + 4);
    }
    return d;
}

} // namespace

TEST(Quadrature, Examples)
{
    const std::array<Point, 4> sq{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
    EXPECT_NEAR(cell_quadrature(sq, 2).integrate([](const Point&) { return 1.0; }), 1.0, 1e-15);
    EXPECT_NEAR(cell_quadrature(sq, 3).integrate([](const Point& p) { return p.x() * p.x() * p.y(); }), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(triangle_quadrature(Point(0, 0), Point(1, 0), Point(0, 1), 2).integrate([](const Point& p) {
        return p.x() * p.y();
    }),
                1.0 / 24.0, 1e-16);
    EXPECT_NEAR(edge_quadrature(Point(0, 0), Point(1, 0), 0).integrate([](const Point&) { return 1.0; }), 1.0, 1e-15);
    EXPECT_NEAR(edge_quadrature(Point(0, 0), Point(1, 0), 3).integrate([](const Point& p) { return std::pow(p.x(), 3); }),
                0.25, 1e-15);
    EXPECT_NEAR(edge_quadrature(Point(0, 0), Point(0, 2), 1).integrate([](const Point& p) { return p.y(); }), 2.0, 1e-15);
}

TEST(Quadrature, WeightsPositiveAndSumToMeasure)
{
    const PolyMesh m = example1_mesh(8);
    for (int c = 0; c < static_cast<int>(m.num_cells()); c += 7) {
        const auto q = cell_quadrature(m.cell_points(c), 6);
        double s = 0.0;
        for (double w : q.weights) {
            EXPECT_GT(w, 0.0);
            s += w;
        }
        EXPECT_NEAR(s, m.cell_area(c), 1e-15);
    }
}

TEST(Quadrature, MonomialExactness) { EXPECT_LT(quadrature_exactness_defect(12), 1e-12); }

TEST(Quadrature, RejectsDegenerateEdge) { EXPECT_THROW(edge_quadrature(Point(1, 1), Point(1, 1), 2), GeometryError); }

TEST(Basis, ScaledMonomials)
{
    const ScaledMonomialBasis b(Point(0.3, -0.2), 0.5, 3);
    EXPECT_EQ(b.dim(), 10);
    const Eigen::VectorXd at_center = b.eval(Point(0.3, -0.2));
    EXPECT_EQ(at_center[0], 1.0);
    EXPECT_EQ(at_center.tail(9).cwiseAbs().maxCoeff(), 0.0);
    // m_{x^2 y} at (0.8, 0.3): (1)^2 (1) = 1
    EXPECT_NEAR(b.eval(Point(0.8, 0.3))[monomial_index(2, 1)], 1.0, 1e-15);
    // derivative maps agree with grad
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd c(b.dim());
    for (int i = 0; i < b.dim(); ++i)
        c[i] = u(rng);
    const Point x(0.1, 0.05);
    const auto g = b.grad(x);
    EXPECT_NEAR(b.eval(x).dot(b.dx_matrix() * c), g.row(0).dot(c), 1e-13);
    EXPECT_NEAR(b.eval(x).dot(b.dy_matrix() * c), g.row(1).dot(c), 1e-13);
}

TEST(Basis, EdgeBasisOrthonormal)
{
    const EdgeBasis e(Point(0.2, 0.1), Point(0.9, 0.6), 3);
    const auto q = edge_quadrature(Point(0.2, 0.1), Point(0.9, 0.6), 8);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Eigen::VectorXd v = e.eval(q.points[i]);
        g += q.weights[i] * v * v.transpose();
    }
    EXPECT_LT((g - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Projection, ReproducesConstantsAndMeans)
{
    const PolyMesh sq = unit_square_cell();
    const Eigen::VectorXd c = l2_project_cell([](const Point&) { return 3.0; }, sq, 0, 2);
    EXPECT_NEAR(c[0], 3.0, 1e-14);
    EXPECT_LT(c.tail(c.size() - 1).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::VectorXd m = l2_project_cell([](const Point& p) { return p.x(); }, sq, 0, 0);
    EXPECT_NEAR(m[0], 0.5, 1e-15);
}

TEST(Projection, IdentityOnPolynomials)
{
    const PolyMesh m = example1_mesh(8);
    auto f = [](const Point& p) { return 1.0 - 2.0 * p.x() + p.x() * p.y() * p.y() + 0.5 * std::pow(p.y(), 3); };
    std::mt19937_64 rng(3);
    for (int c : {0, 17, 101}) {
        const Eigen::VectorXd coeff = l2_project_cell(f, m, c, 3);
        const ScaledMonomialBasis b(m.cell_centroid(c), m.cell_diameter(c), 3);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int i = 0; i < 20; ++i) {
            const Point x = m.cell_centroid(c) + 0.3 * m.cell_diameter(c) * Vec2(u(rng), u(rng));
            EXPECT_NEAR(b.eval(x).dot(coeff), f(x), 1e-11);
        }
    }
}

TEST(Projection, Orthogonality) { EXPECT_LT(projection_orthogonality_defect(example1_mesh(8), 3), 1e-10); }

TEST(Projection, EdgeNormalExamples)
{
    const Point a(0, 0), b(1, 0);
    const Vec2 n(0, 1);
    EXPECT_LT(l2_project_edge_normal([](const Point&) { return Vec2(1, 0); }, a, b, n, 1, 4).norm(), 1e-15);
    const Eigen::VectorXd one = l2_project_edge_normal([](const Point&) { return Vec2(0, 1); }, a, b, n, 1, 4);
    EXPECT_NEAR(one[0], 1.0, 1e-15); // psi_0 = 1 on a unit edge
    EXPECT_NEAR(one[1], 0.0, 1e-15);
    const Eigen::VectorXd half
        = l2_project_edge_normal([](const Point& p) { return Vec2(p.x(), 0); }, Point(0.5, 0), Point(0.5, 1), Vec2(1, 0), 1, 4);
    EXPECT_NEAR(half[0], 0.5, 1e-15);
    EXPECT_NEAR(half[1], 0.0, 1e-15);
}

TEST(WeakDivergence, Examples)
{
    const PolyMesh sq = unit_square_cell();
    const CellOperator op1(sq, 0, Spaces::from_degree(1), 4);
    const Eigen::VectorXd d0 = weak_divergence(op1, local_projection(op1, sq, [](const Point&) { return Vec2(1, 0); }, 1));
    EXPECT_LT(d0.cwiseAbs().maxCoeff(), 1e-14);
    const Eigen::VectorXd d2 = weak_divergence(op1, local_projection(op1, sq, [](const Point& p) { return p; }, 1));
    EXPECT_NEAR(d2[0], 2.0, 1e-13);
    EXPECT_LT(d2.tail(d2.size() - 1).cwiseAbs().maxCoeff(), 1e-13);

    const CellOperator op0(sq, 0, Spaces{0, 0, 0}, 2);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(op0.local_size());
    v[op0.edge_offset(0)] = 1.0; // boundary edge, so n_e is the outward normal
    const Eigen::VectorXd d1 = weak_divergence(op0, v);
    ASSERT_EQ(d1.size(), 1);
    EXPECT_NEAR(d1[0], 1.0, 1e-14);
}

TEST(WeakDivergence, CommutesWithProjection)
{
    const PolyMesh m = example1_mesh(16);
    for (int k = 1; k <= 3; ++k)
        EXPECT_LT(commutativity_defect(m, k, 3, 100 + k), 1e-10) << "k = " << k;
}

TEST(WeakDivergence, QuadraticWitness)
{
    const PolyMesh m = example1_mesh(16);
    const Spaces sp = Spaces::from_degree(2);
    const VectorField v = [](const Point& p) { return Vec2(p.x() * p.x(), p.x() * p.y()); };
    const VectorField rot = [](const Point& p) { return Vec2(p.y(), -p.x()); };
    for (int c = 0; c < static_cast<int>(m.num_cells()); ++c) {
        const CellOperator op(m, c, sp, 6);
        const Eigen::VectorXd d = weak_divergence(op, local_projection(op, m, v, 2));
        const Eigen::VectorXd pi = l2_project_cell([](const Point& p) { return 3.0 * p.x(); }, m, c, 2);
        const Eigen::VectorXd e = d - pi;
        EXPECT_LT(std::sqrt(e.dot(op.mass_beta() * e)), 1e-10);
        EXPECT_LT(weak_divergence(op, local_projection(op, m, rot, 2)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ProjectWg, ConstantFieldHasNoJump)
{
    const PolyMesh m = example1_mesh(8);
    const WgDofMap dofs(m, Spaces::from_degree(2));
    const Eigen::VectorXd q = project_wg([](int, const Point&) { return Vec2(1, 1); }, m, dofs);
    for (int c = 0; c < dofs.num_cells(); ++c) {
        const int o = dofs.cell_u_offset(c);
        EXPECT_NEAR(q[o], 1.0, 1e-13);
        EXPECT_NEAR(q[o + dofs.n_alpha()], 1.0, 1e-13);
    }
    for (const auto& ie : m.interface_edges()) {
        const int b1 = dofs.edge_block(ie.edge, 1), b2 = dofs.edge_block(ie.edge, 2);
        EXPECT_LT((q.segment(b1, dofs.n_edge()) - q.segment(b2, dofs.n_edge())).norm(), 1e-14);
    }
}

TEST(DofMap, Layout)
{
    const PolyMesh m = example1_mesh(8);
    const WgDofMap dofs(m, Spaces::from_degree(2));
    int interior = 0, boundary = 0;
    for (int e = 0; e < static_cast<int>(m.num_edges()); ++e) {
        if (m.edge(e).on_boundary()) {
            ++boundary;
            EXPECT_EQ(dofs.edge_block(e, 1), -1);
            EXPECT_EQ(dofs.edge_block(e, 2), -1);
        } else if (m.is_interface(e)) {
            EXPECT_NE(dofs.edge_block(e, 1), dofs.edge_block(e, 2));
        } else {
            ++interior;
        }
    }
    const int ni = static_cast<int>(m.interface_edges().size());
    EXPECT_GT(boundary, 0);
    EXPECT_EQ(dofs.n_u(), 12 * dofs.num_cells() + 3 * (interior + 2 * ni));
    EXPECT_EQ(dofs.n_p(), 3 * dofs.num_cells());
}

TEST(Taylor, StraightInterfaceIsIdentity)
{
    const auto line = InterfaceCurve::segment(Point(0.5, 0), Point(0.5, 1));
    const ScaledMonomialBasis b(Point(0.4, 0.5), 0.2, 3);
    const Point x(0.5, 0.37);
    const auto pd = project_to_interface(x, line);
    for (auto mode : {TaylorMode::Fast, TaylorMode::Explicit}) {
        EXPECT_LT((taylor_basis_values(b, x, pd, 3, TaylorVariant::T, mode) - b.eval(x)).norm(), 1e-15);
        EXPECT_LT(taylor_basis_values(b, x, pd, 3, TaylorVariant::T1, mode).norm(), 1e-15);
    }
}

TEST(Taylor, Constants)
{
    const ScaledMonomialBasis b(Point(0.3, 0.2), 0.1, 0);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(1, 2.5);
    const Point x(0.3, 0.3);
    const auto pd = project_to_interface(x, circle);
    for (int m = 0; m <= 3; ++m) {
        EXPECT_NEAR(taylor_correct(b, c, x, pd, m, TaylorVariant::T, TaylorMode::Explicit), 2.5, 1e-15);
        EXPECT_NEAR(taylor_correct(b, c, x, pd, m, TaylorVariant::T1, TaylorMode::Explicit), 0.0, 1e-15);
    }
}

TEST(Taylor, LinearAtCircleFoot)
{
    const ScaledMonomialBasis b(Point::Zero(), 1.0, 1);
    const Eigen::Vector3d c(0, 1, 0); // p = x
    const Point x(0.3, 0.3);
    const auto pd = project_to_interface(x, circle);
    const double want = 0.5 / std::sqrt(2.0);
    EXPECT_NEAR(taylor_correct(b, c, x, pd, 1, TaylorVariant::T, TaylorMode::Fast), want, 1e-15);
    EXPECT_NEAR(taylor_correct(b, c, x, pd, 1, TaylorVariant::T, TaylorMode::Explicit), want, 1e-15);
    EXPECT_NEAR(taylor_correct(b, c, x, pd, 1, TaylorVariant::T1, TaylorMode::Explicit), want - 0.3, 1e-15);
}

TEST(Taylor, TruncatedSumDiffersBelowDegree)
{
    const ScaledMonomialBasis b(Point::Zero(), 1.0, 2);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
    c[monomial_index(2, 0)] = 1.0; // x^2
    const Point x(0.3, 0.3);
    const auto pd = project_to_interface(x, circle);
    const double t1 = taylor_correct(b, c, x, pd, 1, TaylorVariant::T, TaylorMode::Explicit);
    const double dx = pd.delta * pd.nu.x();
    EXPECT_NEAR(t1, 0.09 + 2.0 * 0.3 * dx, 1e-15);
    EXPECT_NEAR(taylor_correct(b, c, x, pd, 2, TaylorVariant::T, TaylorMode::Explicit), pd.foot.x() * pd.foot.x(), 1e-15);
}

TEST(Taylor, RejectsNegativeOrder)
{
    const ScaledMonomialBasis b(Point::Zero(), 1.0, 1);
    const auto pd = project_to_interface(Point(0.3, 0.3), circle);
    EXPECT_THROW(taylor_correct(b, Eigen::Vector3d(1, 0, 0), Point(0.3, 0.3), pd, -1, TaylorVariant::T), Error);
}

TEST(Taylor, TrickEquivalence)
{
    const PolyMesh m = example1_mesh(16);
    EXPECT_LT(taylor_trick_deviation(m, circle, 3, 100, 5), 1e-12);
}

TEST(Spaces, Validation)
{
    EXPECT_EQ(Spaces::from_degree(2), (Spaces{2, 2, 1}));
    EXPECT_THROW(Spaces::from_degree(0), Error);
    EXPECT_THROW((Spaces{1, 1, 2}).validate(), Error);
}
