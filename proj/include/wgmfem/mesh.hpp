#pragma once

#include "wgmfem/geometry.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace wgmfem {

class MeshError : public Error {
public:
    using Error::Error;
};

inline constexpr int no_cell = -1;

/// Mesh edge v0 -> v1.  The left cell sees the edge counter-clockwise; the
/// prescribed normal n_e is the clockwise rotation of v0 -> v1 and therefore
/// points from the left cell to the right cell.
struct Edge {
    int v0 = 0, v1 = 0;
    int left = no_cell;
    int right = no_cell; ///< no_cell on the domain boundary
    Vec2 normal = Vec2::Zero();
    double length = 0.0;

    bool on_boundary() const { return right == no_cell; }
};

/// Local view of an edge from one of its cells.
struct CellEdge {
    int edge = 0;
    double sign = 1.0; ///< n_e . n_K (+1 when the cell is the left cell)
};

/// An edge of the discrete interface Gamma_h together with its two cells.
struct InterfaceEdge {
    int edge = 0;
    int cell1 = 0;      ///< adjacent cell of region 1
    int cell2 = 0;      ///< adjacent cell of region 2
    double sign = 1.0;  ///< n_e . n_h, with n_h pointing region 1 -> region 2
};

/// Body-fitted polygonal mesh of a box split into two regions by Gamma_h.
class PolyMesh {
public:
    PolyMesh() = default;

    /// Builds topology from counter-clockwise vertex loops and per-cell region labels.
    PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells, std::vector<int> labels);

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_cells() const { return cells_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::vector<Point>& vertices() const { return vertices_; }
    const Point& vertex(int i) const { return vertices_[i]; }
    const std::vector<int>& cell(int c) const { return cells_[c]; }
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    const std::vector<CellEdge>& cell_edges(int c) const { return cell_edges_[c]; }
    const Edge& edge(int e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    int label(int c) const { return labels_[c]; }
    const std::vector<int>& labels() const { return labels_; }

    const std::vector<InterfaceEdge>& interface_edges() const { return interface_; }
    /// Index into interface_edges() or -1.
    int interface_index(int edge) const { return interface_index_[edge]; }
    bool is_interface(int edge) const { return interface_index_[edge] >= 0; }

    double cell_diameter(int c) const { return diameter_[c]; }
    double cell_area(int c) const { return area_[c]; }
    const Point& cell_centroid(int c) const { return centroid_[c]; }
    /// max cell diameter
    double h() const { return h_; }

    std::vector<Point> cell_points(int c) const;
    double total_area() const;

private:
    std::vector<Point> vertices_;
    std::vector<std::vector<int>> cells_;
    std::vector<int> labels_;
    std::vector<Edge> edges_;
    std::vector<std::vector<CellEdge>> cell_edges_;
    std::vector<InterfaceEdge> interface_;
    std::vector<int> interface_index_;
    std::vector<double> diameter_, area_;
    std::vector<Point> centroid_;
    double h_ = 0.0;
};

double polygon_area(std::span<const Point> pts);
Point polygon_centroid(std::span<const Point> pts);
double polygon_diameter(std::span<const Point> pts);

/// Snapped structured triangulation: vertices near the curve are moved onto it
/// so that Gamma_h is a polyline of mesh edges inscribed in the curve.
PolyMesh generate_fitted_tri_mesh(const Box& domain, const InterfaceCurve& curve, int n);

/// Tensor quadrilateral grid deformed vertically so that one grid row follows a graph interface.
PolyMesh generate_fitted_quad_mesh(const Box& domain, const InterfaceCurve& curve, int n);

void save_mesh(const PolyMesh& mesh, const std::filesystem::path& path);
void save_mesh(const PolyMesh& mesh, std::ostream& os);

/// Loads a mesh; with a curve, interface vertices are checked to lie on it within 1e-10.
PolyMesh load_mesh(const std::filesystem::path& path, const std::optional<InterfaceCurve>& curve = std::nullopt);
PolyMesh load_mesh(std::istream& is, const std::optional<InterfaceCurve>& curve = std::nullopt);

/// Throws MeshError if an interface vertex is farther than tol from the curve.
void validate_fit(const PolyMesh& mesh, const InterfaceCurve& curve, double tol = 1e-10);

struct MeshQualityReport {
    double h = 0.0;
    double max_delta = 0.0;       ///< sup of delta_h over interface-edge quadrature points
    double min_angle_deg = 0.0;   ///< smallest interior angle over all cells
    double max_aspect = 0.0;      ///< max of h_K / inradius proxy (2|K| / perimeter)
    double area_label1 = 0.0;
    double area_label2 = 0.0;
    int euler_characteristic = 0; ///< V - E + C
};

/// quad_order: order of the edge Gauss rule used to sample delta_h.
MeshQualityReport quality_report(const PolyMesh& mesh, const InterfaceCurve& curve, int quad_order = 6);

/// Least-squares slope of log(values) against log(h).
double loglog_slope(std::span<const double> h, std::span<const double> values);

} // namespace wgmfem
