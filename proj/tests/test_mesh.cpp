#include "wgmfem/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace wgmfem;

namespace {

const Box square{-1.0, 1.0, -1.0, 1.0};
const Box unit{0.0, 1.0, 0.0, 1.0};
const Box strip{0.0, 1.0, -0.5, 0.5};
const InterfaceCurve circle = InterfaceCurve::circle(Point::Zero(), 0.5);
const InterfaceCurve wave = InterfaceCurve::graph(0.05, 3.0);
const InterfaceCurve line = InterfaceCurve::segment(Point(0.5, 0.0), Point(0.5, 1.0));

// inradius proxy 2|K| / perimeter
double inradius(const PolyMesh& m, int c)
{
    const auto pts = m.cell_points(c);
    double per = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        per += (pts[(i + 1) % pts.size()] - pts[i]).norm();
    return 2.0 * m.cell_area(c) / per;
}

void check_invariants(const PolyMesh& m, const InterfaceCurve& c, const Box& box)
{
    double a = 0.0;
    for (std::size_t k = 0; k < m.num_cells(); ++k) {
        EXPECT_GT(m.cell_area(k), 0.0);
        EXPECT_LT(m.cell_diameter(k) / inradius(m, k), 10.0) << "cell " << k;
        a += m.cell_area(k);
    }
    EXPECT_NEAR(a, box.area(), 1e-10);
    const auto q = quality_report(m, c);
    EXPECT_EQ(q.euler_characteristic, 1);
    EXPECT_NEAR(q.area_label1 + q.area_label2, box.area(), 1e-10);

    for (const auto& e : m.edges()) {
        const Vec2 t = m.vertex(e.v1) - m.vertex(e.v0);
        EXPECT_NEAR(e.normal.norm(), 1.0, 1e-12);
        EXPECT_LT(std::abs(e.normal.dot(t)), 1e-12 * t.norm());
    }
    ASSERT_FALSE(m.interface_edges().empty());
    std::map<int, int> degree;
    for (const auto& ie : m.interface_edges()) {
        const Edge& e = m.edge(ie.edge);
        EXPECT_EQ(m.label(ie.cell1), 1);
        EXPECT_EQ(m.label(ie.cell2), 2);
        EXPECT_LT(std::abs(distance_to_interface(m.vertex(e.v0), c)), 1e-10);
        EXPECT_LT(std::abs(distance_to_interface(m.vertex(e.v1), c)), 1e-10);
        // n_h points into the label-2 cell
        const Vec2 n_h = ie.sign * e.normal;
        EXPECT_GT(n_h.dot(m.cell_centroid(ie.cell2) - m.cell_centroid(ie.cell1)), 0.0);
        ++degree[e.v0];
        ++degree[e.v1];
    }
    int ends = 0;
    for (const auto& [v, d] : degree) {
        EXPECT_LE(d, 2);
        if (d == 1) {
            ++ends;
            EXPECT_FALSE(box.contains(m.vertex(v), -1e-12)) << "open end inside the domain";
        }
    }
    EXPECT_EQ(ends, c.is_circle() ? 0 : 2);
}

} // namespace

TEST(TriMesh, CircleInvariants)
{
    for (int n : {8, 16, 32}) {
        const PolyMesh m = generate_fitted_tri_mesh(square, circle, n);
        check_invariants(m, circle, square);
    }
}

TEST(TriMesh, InterfaceVerticesOnCircle)
{
    const PolyMesh m = generate_fitted_tri_mesh(square, circle, 16);
    for (const auto& ie : m.interface_edges()) {
        const Edge& e = m.edge(ie.edge);
        EXPECT_LT(std::abs(m.vertex(e.v0).norm() - 0.5), 1e-12);
        EXPECT_LT(std::abs(m.vertex(e.v1).norm() - 0.5), 1e-12);
    }
}

TEST(TriMesh, DeltaQuartersUnderRefinement)
{
    const double d16 = quality_report(generate_fitted_tri_mesh(square, circle, 16), circle).max_delta;
    const double d32 = quality_report(generate_fitted_tri_mesh(square, circle, 32), circle).max_delta;
    EXPECT_GT(d16, 0.0);
    EXPECT_LE(d32 / d16, 0.35);
}

TEST(TriMesh, DeltaSlope)
{
    std::vector<double> h, d;
    for (int n : {16, 32, 64, 128}) {
        h.push_back(2.0 / n);
        d.push_back(quality_report(generate_fitted_tri_mesh(square, circle, n), circle).max_delta);
    }
    EXPECT_GE(loglog_slope(h, d), 1.8);
}

TEST(TriMesh, StraightInterfaceHasNoGap)
{
    const PolyMesh m = generate_fitted_tri_mesh(unit, line, 8);
    check_invariants(m, line, unit);
    EXPECT_EQ(quality_report(m, line).max_delta, 0.0);
}

TEST(TriMesh, WavyInterface)
{
    const PolyMesh m = generate_fitted_tri_mesh(strip, wave, 16);
    check_invariants(m, wave, strip);
}

TEST(TriMesh, RejectsTooCoarse) { EXPECT_THROW(generate_fitted_tri_mesh(square, circle, 3), MeshError); }

TEST(QuadMesh, FollowsGraph)
{
    const PolyMesh m = generate_fitted_quad_mesh(strip, wave, 8);
    check_invariants(m, wave, strip);
    for (const auto& ie : m.interface_edges()) {
        for (int v : {m.edge(ie.edge).v0, m.edge(ie.edge).v1}) {
            const Point& p = m.vertex(v);
            EXPECT_LT(std::abs(p.y() - 0.05 * std::sin(3.0 * M_PI * p.x())), 1e-14);
        }
    }
}

TEST(QuadMesh, CellsConvex)
{
    for (int n : {8, 16}) {
        const PolyMesh m = generate_fitted_quad_mesh(strip, wave, n);
        for (std::size_t c = 0; c < m.num_cells(); ++c) {
            const auto p = m.cell_points(c);
            ASSERT_EQ(p.size(), 4u);
            for (int i = 0; i < 4; ++i) {
                const Vec2 a = p[(i + 1) % 4] - p[i], b = p[(i + 2) % 4] - p[(i + 1) % 4];
                EXPECT_GT(a.x() * b.y() - a.y() * b.x(), 0.0);
            }
        }
    }
}

TEST(QuadMesh, FlatGraphIsUniform)
{
    const auto flat = InterfaceCurve::graph(0.0, 3.0);
    const PolyMesh m = generate_fitted_quad_mesh(strip, flat, 8);
    EXPECT_EQ(quality_report(m, flat).max_delta, 0.0);
    for (std::size_t c = 0; c < m.num_cells(); ++c)
        EXPECT_NEAR(m.cell_area(c), 1.0 / 64.0, 1e-15);
    for (const auto& ie : m.interface_edges())
        EXPECT_EQ(m.vertex(m.edge(ie.edge).v0).y(), 0.0);
}

TEST(QuadMesh, RequiresGraph) { EXPECT_THROW(generate_fitted_quad_mesh(square, circle, 8), MeshError); }

TEST(Quality, ChordSagitta)
{
    // one chord of a circle with half-angle t
    const double r = 0.5, t = 0.3;
    const Point a(r * std::cos(-t), r * std::sin(-t)), b(r * std::cos(t), r * std::sin(t));
    const PolyMesh m({Point(0, 0), a, b, Point(1, 0)}, {{0, 1, 2}, {1, 3, 2}}, {1, 2});
    ASSERT_EQ(m.interface_edges().size(), 1u);
    EXPECT_NEAR(quality_report(m, circle, 9).max_delta, r * (1.0 - std::cos(t)), 1e-13);
}

TEST(MeshIO, RoundTripIsExact)
{
    const PolyMesh m = generate_fitted_tri_mesh(square, circle, 8);
    std::stringstream ss;
    save_mesh(m, ss);
    const PolyMesh r = load_mesh(ss, circle);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    for (std::size_t v = 0; v < m.num_vertices(); ++v)
        EXPECT_EQ(r.vertex(v), m.vertex(v));
    EXPECT_EQ(r.cells(), m.cells());
    EXPECT_EQ(r.labels(), m.labels());
    ASSERT_EQ(r.num_edges(), m.num_edges());
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
        EXPECT_EQ(r.edge(e).v0, m.edge(e).v0);
        EXPECT_EQ(r.edge(e).left, m.edge(e).left);
        EXPECT_EQ(r.edge(e).right, m.edge(e).right);
    }
    EXPECT_EQ(r.interface_edges().size(), m.interface_edges().size());
}

TEST(MeshIO, RejectsTwoVertexCell)
{
    std::stringstream ss("polymesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n2 0 1\nlabels\n1\ninterface_edges 0\n");
    EXPECT_THROW(load_mesh(ss), MeshError);
}

TEST(MeshIO, RejectsMalformedHeader)
{
    std::stringstream ss("mesh 2\n");
    EXPECT_THROW(load_mesh(ss), MeshError);
}

TEST(MeshIO, RejectsInterfaceVertexOffCurve)
{
    const double r = 0.5 + 1e-3;
    std::ostringstream os;
    os.precision(17);
    os << "polymesh 1\nvertices 4\n0 0\n" << r << " 0\n0 " << r << "\n1 1\n";
    os << "cells 2\n3 0 1 2\n3 1 3 2\nlabels\n1 2\ninterface_edges 1\n1 2\n";
    std::stringstream ok(os.str());
    EXPECT_NO_THROW(load_mesh(ok));
    std::stringstream bad(os.str());
    EXPECT_THROW(load_mesh(bad, circle), MeshError);
}

TEST(PolyMesh, RejectsClockwiseCell)
{
    EXPECT_THROW(PolyMesh({Point(0, 0), Point(1, 0), Point(0, 1)}, {{0, 2, 1}}, {1}), MeshError);
}

TEST(PolyMesh, RejectsBadLabel)
{
    EXPECT_THROW(PolyMesh({Point(0, 0), Point(1, 0), Point(0, 1)}, {{0, 1, 2}}, {3}), MeshError);
}
