#include "wgmfem/mesh.hpp"

#include "wgmfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

namespace wgmfem {

namespace {

std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_perimeter(std::span<const Point> pts)
{
    double p = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        p += (pts[(i + 1) % pts.size()] - pts[i]).norm();
    return p;
}

double min_angle_deg(std::span<const Point> pts)
{
    double amin = 180.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = pts[(i + n - 1) % n] - pts[i];
        const Vec2 b = pts[(i + 1) % n] - pts[i];
        const double ang = std::atan2(std::abs(cross(a, b)), a.dot(b)) * 180.0 / std::numbers::pi;
        amin = std::min(amin, ang);
    }
    return amin;
}

// inradius / diameter; zero for degenerate or inverted triangles.
double triangle_quality(const Point& a, const Point& b, const Point& c)
{
    const std::array<Point, 3> t{a, b, c};
    const double area = 0.5 * cross(b - a, c - a);
    if (!(area > 0.0))
        return 0.0;
    return 2.0 * area / polygon_perimeter(t) / polygon_diameter(t);
}

std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

double polygon_area(std::span<const Point> pts)
{
    double a = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        a += cross(pts[i], pts[(i + 1) % pts.size()]);
    return 0.5 * a;
}

Point polygon_centroid(std::span<const Point> pts)
{
    // Shifted to the first vertex for accuracy on small cells far from the origin.
    const Point o = pts[0];
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 p = pts[i] - o;
        const Vec2 q = pts[(i + 1) % pts.size()] - o;
        const double w = cross(p, q);
        a += w;
        c += w * (p + q);
    }
    return o + c / (3.0 * a);
}

double polygon_diameter(std::span<const Point> pts)
{
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

PolyMesh::PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells, std::vector<int> labels)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), labels_(std::move(labels))
{
    if (labels_.size() != cells_.size())
        throw MeshError("mesh: number of labels does not match number of cells");

    const int nv = static_cast<int>(vertices_.size());
    std::unordered_map<std::uint64_t, int> lookup;
    lookup.reserve(cells_.size() * 3);
    cell_edges_.resize(cells_.size());
    diameter_.resize(cells_.size());
    area_.resize(cells_.size());
    centroid_.resize(cells_.size());

    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& loop = cells_[c];
        const std::string id = "cell " + std::to_string(c);
        if (loop.size() < 3)
            throw MeshError(id + " has fewer than three vertices");
        if (labels_[c] != 1 && labels_[c] != 2)
            throw MeshError(id + " has a region label other than 1 or 2");
        for (int v : loop)
            if (v < 0 || v >= nv)
                throw MeshError(id + " references a missing vertex");

        const auto pts = cell_points(static_cast<int>(c));
        area_[c] = polygon_area(pts);
        if (!(area_[c] > 0.0))
            throw MeshError(id + " is not a positively oriented polygon with positive area");
        diameter_[c] = polygon_diameter(pts);
        centroid_[c] = polygon_centroid(pts);
        h_ = std::max(h_, diameter_[c]);

        for (std::size_t i = 0; i < loop.size(); ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % loop.size()];
            if (a == b)
                throw MeshError(id + " repeats a vertex");
            const auto key = edge_key(a, b);
            auto it = lookup.find(key);
            if (it == lookup.end()) {
                Edge e;
                e.v0 = a;
                e.v1 = b;
                e.left = static_cast<int>(c);
                const Vec2 t = vertices_[b] - vertices_[a];
                e.length = t.norm();
                e.normal = Vec2(t.y(), -t.x()) / e.length;
                lookup.emplace(key, static_cast<int>(edges_.size()));
                cell_edges_[c].push_back({static_cast<int>(edges_.size()), 1.0});
                edges_.push_back(e);
            } else {
                Edge& e = edges_[it->second];
                if (e.right != no_cell)
                    throw MeshError(id + " shares an edge already bordered by two cells");
                if (e.v0 != b || e.v1 != a)
                    throw MeshError(id + " is inconsistently oriented with its neighbor");
                e.right = static_cast<int>(c);
                cell_edges_[c].push_back({it->second, -1.0});
            }
        }
    }

    interface_index_.assign(edges_.size(), -1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        if (ed.on_boundary() || labels_[ed.left] == labels_[ed.right])
            continue;
        InterfaceEdge ie;
        ie.edge = static_cast<int>(e);
        const bool left_is_1 = labels_[ed.left] == 1;
        ie.cell1 = left_is_1 ? ed.left : ed.right;
        ie.cell2 = left_is_1 ? ed.right : ed.left;
        ie.sign = left_is_1 ? 1.0 : -1.0;
        interface_index_[e] = static_cast<int>(interface_.size());
        interface_.push_back(ie);
    }
}

std::vector<Point> PolyMesh::cell_points(int c) const
{
    std::vector<Point> pts;
    pts.reserve(cells_[c].size());
    for (int v : cells_[c])
        pts.push_back(vertices_[v]);
    return pts;
}

double PolyMesh::total_area() const
{
    double a = 0.0;
    for (double x : area_)
        a += x;
    return a;
}

PolyMesh generate_fitted_tri_mesh(const Box& domain, const InterfaceCurve& curve, int n)
{
    if (n < 4)
        throw MeshError("generate_fitted_tri_mesh: need n >= 4 cells per side");
    if (const auto* c = std::get_if<Circle>(&curve.shape())) {
        const Point& o = c->center;
        if (!(o.x() - c->radius > domain.xmin && o.x() + c->radius < domain.xmax && o.y() - c->radius > domain.ymin
              && o.y() + c->radius < domain.ymax))
            throw MeshError("generate_fitted_tri_mesh: circle interface must lie strictly inside the domain");
    }

    const double hx = domain.width() / n;
    const double hy = domain.height() / n;
    const double h = std::max(hx, hy);
    const int np = n + 1;
    auto idx = [np](int i, int j) { return j * np + i; };

    std::vector<Point> pos(np * np);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            pos[idx(i, j)] = Point(i == n ? domain.xmax : domain.xmin + i * hx, j == n ? domain.ymax : domain.ymin + j * hy);
    const std::vector<Point> grid = pos;

    std::vector<int> sign(pos.size());
    std::vector<double> dist(pos.size());
    std::vector<char> snapped(pos.size(), 0);
    for (std::size_t v = 0; v < pos.size(); ++v) {
        dist[v] = distance_to_interface(pos[v], curve);
        const double lv = curve.level(pos[v]);
        sign[v] = dist[v] <= 1e-14 ? 0 : (lv < 0.0 ? -1 : 1);
        if (sign[v] == 0)
            snapped[v] = 1;
    }

    // Root of the level function on the grid segment [p, q] (level changes sign there).
    auto boundary_root = [&](const Point& p, const Point& q) -> std::optional<Point> {
        double fa = curve.level(p), fb = curve.level(q);
        if (fa == 0.0)
            return p;
        if (fb == 0.0)
            return q;
        if ((fa < 0.0) == (fb < 0.0))
            return std::nullopt;
        double a = 0.0, b = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            if (m == a || m == b)
                break;
            const double fm = curve.level(p + m * (q - p));
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
            } else {
                b = m;
            }
        }
        return Point(p + 0.5 * (a + b) * (q - p));
    };

    auto try_snap = [&](int v) -> bool {
        if (snapped[v])
            return true;
        const int i = v % np;
        const int j = v / np;
        const bool bx = i == 0 || i == n;
        const bool by = j == 0 || j == n;
        if (bx && by)
            return false;
        if (!bx && !by) {
            pos[v] = project_to_interface(grid[v], curve).foot;
            snapped[v] = 1;
            return true;
        }
        // Boundary vertex: slide along its side of the box.
        const int prev = bx ? idx(i, j - 1) : idx(i - 1, j);
        const int next = bx ? idx(i, j + 1) : idx(i + 1, j);
        std::optional<Point> best;
        for (int other : {prev, next}) {
            auto r = boundary_root(grid[v], grid[other]);
            if (r && (!best || (*r - grid[v]).norm() < (*best - grid[v]).norm()))
                best = r;
        }
        if (!best)
            return false;
        pos[v] = *best;
        snapped[v] = 1;
        return true;
    };

    // Rule 1: vertices close to the curve.
    for (std::size_t v = 0; v < pos.size(); ++v)
        if (!snapped[v] && dist[v] < 0.4 * h)
            try_snap(static_cast<int>(v));

    // Rule 2: every grid line segment still crossing the curve gets one endpoint snapped.
    auto resolve_crossing = [&](int a, int b) {
        if (snapped[a] || snapped[b] || sign[a] * sign[b] >= 0)
            return;
        int first = a, second = b;
        if (dist[b] < dist[a] || (dist[b] == dist[a] && b < a))
            std::swap(first, second);
        if (!try_snap(first) && !try_snap(second))
            throw MeshError("generate_fitted_tri_mesh: cannot snap grid segment crossing the interface; "
                            "retry with a larger n");
    };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i)
            resolve_crossing(idx(i, j), idx(i + 1, j));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i)
            resolve_crossing(idx(i, j), idx(i, j + 1));

    for (std::size_t v = 0; v < pos.size(); ++v)
        if (snapped[v])
            sign[v] = 0;

    std::vector<std::vector<int>> cells;
    std::vector<int> labels;
    cells.reserve(2 * n * n);
    labels.reserve(2 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
            const bool ac_ok = sign[a] * sign[c] >= 0;
            const bool bd_ok = sign[b] * sign[d] >= 0;
            const double q_ac = ac_ok ? std::min(triangle_quality(pos[a], pos[b], pos[c]), triangle_quality(pos[a], pos[c], pos[d])) : 0.0;
            const double q_bd = bd_ok ? std::min(triangle_quality(pos[a], pos[b], pos[d]), triangle_quality(pos[b], pos[c], pos[d])) : 0.0;
            if (!(std::max(q_ac, q_bd) > 1e-3)) {
                throw MeshError("generate_fitted_tri_mesh: snapping produced a degenerate cell in square ("
                                + std::to_string(i) + ", " + std::to_string(j) + "); retry with a larger n");
            }
            const bool use_ac = q_ac >= q_bd;
            std::array<std::array<int, 3>, 2> tris = use_ac ? std::array<std::array<int, 3>, 2>{{{a, b, c}, {a, c, d}}}
                                                            : std::array<std::array<int, 3>, 2>{{{a, b, d}, {b, c, d}}};
            for (const auto& t : tris) {
                int lab = 0;
                for (int v : t) {
                    if (sign[v] == 0)
                        continue;
                    const int l = sign[v] < 0 ? 1 : 2;
                    if (lab != 0 && lab != l)
                        throw MeshError("generate_fitted_tri_mesh: a cell straddles the interface; retry with a larger n");
                    lab = l;
                }
                if (lab == 0) {
                    const std::array<Point, 3> tp{pos[t[0]], pos[t[1]], pos[t[2]]};
                    lab = side_of(polygon_centroid(tp), curve);
                }
                cells.push_back({t[0], t[1], t[2]});
                labels.push_back(lab);
            }
        }
    }

    PolyMesh mesh(std::move(pos), std::move(cells), std::move(labels));
    validate_fit(mesh, curve);
    return mesh;
}

PolyMesh generate_fitted_quad_mesh(const Box& domain, const InterfaceCurve& curve, int n)
{
    const auto* g = std::get_if<SineGraph>(&curve.shape());
    if (!g)
        throw MeshError("generate_fitted_quad_mesh: requires a graph interface");
    if (n < 4)
        throw MeshError("generate_fitted_quad_mesh: need n >= 4 cells per side");

    const double hx = domain.width() / n;
    const double hy = domain.height() / n;
    const int j0 = std::clamp(static_cast<int>(std::lround(-domain.ymin / hy)), 1, n - 1);
    const double y0 = domain.ymin + j0 * hy;
    const int np = n + 1;

    std::vector<Point> pos(np * np);
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const double x = i == n ? domain.xmax : domain.xmin + i * hx;
            const double y = j == n ? domain.ymax : domain.ymin + j * hy;
            const double shift = g->phi(x) - y0;
            double yy;
            if (j == j0)
                yy = g->phi(x);
            else if (j < j0)
                yy = y + shift * (y - domain.ymin) / (y0 - domain.ymin);
            else
                yy = y + shift * (domain.ymax - y) / (domain.ymax - y0);
            pos[j * np + i] = Point(x, yy);
        }
    }

    std::vector<std::vector<int>> cells;
    std::vector<int> labels;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::vector<int> q{j * np + i, j * np + i + 1, (j + 1) * np + i + 1, (j + 1) * np + i};
            for (int k = 0; k < 4; ++k) {
                const Point& p0 = pos[q[(k + 3) % 4]];
                const Point& p1 = pos[q[k]];
                const Point& p2 = pos[q[(k + 1) % 4]];
                if (!(cross(p1 - p0, p2 - p1) > 0.0))
                    throw MeshError("generate_fitted_quad_mesh: interface amplitude too large for this grid; cell ("
                                    + std::to_string(i) + ", " + std::to_string(j) + ") is not convex");
            }
            cells.push_back(q);
            labels.push_back(j < j0 ? 1 : 2);
        }
    }
    PolyMesh mesh(std::move(pos), std::move(cells), std::move(labels));
    validate_fit(mesh, curve);
    return mesh;
}

void validate_fit(const PolyMesh& mesh, const InterfaceCurve& curve, double tol)
{
    for (const auto& ie : mesh.interface_edges()) {
        const Edge& e = mesh.edge(ie.edge);
        for (int v : {e.v0, e.v1}) {
            const double d = distance_to_interface(mesh.vertex(v), curve);
            if (!(d <= tol)) {
                throw MeshError("interface vertex " + std::to_string(v) + " lies " + fmt17(d)
                                + " away from the interface curve");
            }
        }
    }
}

void save_mesh(const PolyMesh& mesh, std::ostream& os)
{
    os << "polymesh 1\n";
    os << "vertices " << mesh.num_vertices() << "\n";
    for (const auto& p : mesh.vertices())
        os << fmt17(p.x()) << " " << fmt17(p.y()) << "\n";
    os << "cells " << mesh.num_cells() << "\n";
    for (const auto& c : mesh.cells()) {
        os << c.size();
        for (int v : c)
            os << " " << v;
        os << "\n";
    }
    os << "labels\n";
    for (int l : mesh.labels())
        os << l << "\n";
    os << "interface_edges " << mesh.interface_edges().size() << "\n";
    for (const auto& ie : mesh.interface_edges()) {
        const Edge& e = mesh.edge(ie.edge);
        os << e.v0 << " " << e.v1 << "\n";
    }
}

void save_mesh(const PolyMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os)
        throw MeshError("cannot open mesh file for writing: " + path.string());
    save_mesh(mesh, os);
}

PolyMesh load_mesh(std::istream& is, const std::optional<InterfaceCurve>& curve)
{
    auto expect = [&](const std::string& word) {
        std::string tok;
        if (!(is >> tok) || tok != word)
            throw MeshError("malformed mesh file: expected '" + word + "'");
    };
    auto read_count = [&](const char* what) {
        long long n = -1;
        if (!(is >> n) || n < 0)
            throw MeshError(std::string("malformed mesh file: bad ") + what + " count");
        return static_cast<std::size_t>(n);
    };

    expect("polymesh");
    int version = 0;
    if (!(is >> version) || version != 1)
        throw MeshError("malformed mesh file: unsupported version");

    expect("vertices");
    std::vector<Point> vertices(read_count("vertex"));
    for (auto& p : vertices) {
        std::string xs, ys;
        if (!(is >> xs >> ys))
            throw MeshError("malformed mesh file: truncated vertex list");
        try {
            p = Point(std::stod(xs), std::stod(ys));
        } catch (const std::exception&) {
            throw MeshError("malformed mesh file: bad vertex coordinate");
        }
    }

    expect("cells");
    std::vector<std::vector<int>> cells(read_count("cell"));
    for (std::size_t c = 0; c < cells.size(); ++c) {
        int k = 0;
        if (!(is >> k) || k < 0)
            throw MeshError("malformed mesh file: bad cell size");
        if (k < 3)
            throw MeshError("mesh topology error: cell " + std::to_string(c) + " has " + std::to_string(k) + " vertices");
        cells[c].resize(k);
        for (int& v : cells[c])
            if (!(is >> v))
                throw MeshError("malformed mesh file: truncated cell list");
    }

    expect("labels");
    std::vector<int> labels(cells.size());
    for (int& l : labels)
        if (!(is >> l))
            throw MeshError("malformed mesh file: truncated label list");

    expect("interface_edges");
    std::vector<std::pair<int, int>> iface(read_count("interface edge"));
    for (auto& [a, b] : iface)
        if (!(is >> a >> b))
            throw MeshError("malformed mesh file: truncated interface edge list");

    PolyMesh mesh(std::move(vertices), std::move(cells), std::move(labels));

    std::set<std::uint64_t> listed;
    for (const auto& [a, b] : iface)
        listed.insert(edge_key(a, b));
    std::set<std::uint64_t> actual;
    for (const auto& ie : mesh.interface_edges())
        actual.insert(edge_key(mesh.edge(ie.edge).v0, mesh.edge(ie.edge).v1));
    if (listed != actual || listed.size() != iface.size())
        throw MeshError("mesh topology error: interface edge list does not match the region labels");

    if (curve)
        validate_fit(mesh, *curve);
    return mesh;
}

PolyMesh load_mesh(const std::filesystem::path& path, const std::optional<InterfaceCurve>& curve)
{
    std::ifstream is(path);
    if (!is)
        throw MeshError("cannot open mesh file: " + path.string());
    return load_mesh(is, curve);
}

MeshQualityReport quality_report(const PolyMesh& mesh, const InterfaceCurve& curve, int quad_order)
{
    MeshQualityReport r;
    r.h = mesh.h();
    r.min_angle_deg = 180.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const auto pts = mesh.cell_points(static_cast<int>(c));
        r.min_angle_deg = std::min(r.min_angle_deg, min_angle_deg(pts));
        const double inradius = 2.0 * mesh.cell_area(static_cast<int>(c)) / polygon_perimeter(pts);
        r.max_aspect = std::max(r.max_aspect, mesh.cell_diameter(static_cast<int>(c)) / inradius);
        (mesh.label(static_cast<int>(c)) == 1 ? r.area_label1 : r.area_label2) += mesh.cell_area(static_cast<int>(c));
    }
    for (const auto& ie : mesh.interface_edges()) {
        const Edge& e = mesh.edge(ie.edge);
        const auto q = edge_quadrature(mesh.vertex(e.v0), mesh.vertex(e.v1), quad_order);
        for (const auto& p : q.points)
            r.max_delta = std::max(r.max_delta, project_to_interface(p, curve).delta);
    }
    r.euler_characteristic = static_cast<int>(mesh.num_vertices()) - static_cast<int>(mesh.num_edges())
                             + static_cast<int>(mesh.num_cells());
    return r;
}

double loglog_slope(std::span<const double> h, std::span<const double> values)
{
    if (h.size() != values.size() || h.size() < 2)
        throw Error("loglog_slope: need at least two matching samples");
    const double n = static_cast<double>(h.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = std::log(h[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace wgmfem
