#include "wgmfem/dofmap.hpp"

namespace wgmfem {

WgDofMap::WgDofMap(const PolyMesh& mesh, const Spaces& spaces) : spaces_(spaces), cell_labels_(mesh.labels())
{
    spaces_.validate();
    int next = 2 * n_alpha() * static_cast<int>(mesh.num_cells());
    edge_blocks_.assign(mesh.num_edges(), {-1, -1});
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.edge(static_cast<int>(e)).on_boundary())
            continue;
        edge_blocks_[e][0] = next;
        next += n_edge();
        if (mesh.is_interface(static_cast<int>(e))) {
            edge_blocks_[e][1] = next;
            next += n_edge();
        } else {
            edge_blocks_[e][1] = edge_blocks_[e][0];
        }
    }
    n_u_ = next;
    n_p_ = n_sigma() * static_cast<int>(mesh.num_cells());
}

int WgDofMap::edge_block(int edge, int side) const
{
    if (side != 1 && side != 2)
        throw Error("WgDofMap: side must be 1 or 2");
    return edge_blocks_[edge][side - 1];
}

int WgDofMap::cell_edge_block(const PolyMesh& mesh, int c, int j) const
{
    return edge_block(mesh.cell_edges(c)[j].edge, cell_labels_[c]);
}

std::vector<int> WgDofMap::local_u_dofs(const PolyMesh& mesh, int c) const
{
    const auto& ce = mesh.cell_edges(c);
    std::vector<int> dofs;
    dofs.reserve(2 * n_alpha() + ce.size() * n_edge());
    for (int i = 0; i < 2 * n_alpha(); ++i)
        dofs.push_back(cell_u_offset(c) + i);
    for (std::size_t j = 0; j < ce.size(); ++j) {
        const int b = cell_edge_block(mesh, c, static_cast<int>(j));
        for (int i = 0; i < n_edge(); ++i)
            dofs.push_back(b < 0 ? -1 : b + i);
    }
    return dofs;
}

Eigen::VectorXd project_wg(const std::function<Vec2(int, const Point&)>& v, const PolyMesh& mesh, const WgDofMap& dofs,
                           int extra_order)
{
    const Spaces& s = dofs.spaces();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.n_u());
    const int na = dofs.n_alpha();
    for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
        const int side = mesh.label(c);
        const auto vx = l2_project_cell([&](const Point& x) { return v(side, x).x(); }, mesh, c, s.alpha, extra_order);
        const auto vy = l2_project_cell([&](const Point& x) { return v(side, x).y(); }, mesh, c, s.alpha, extra_order);
        out.segment(dofs.cell_u_offset(c), na) = vx;
        out.segment(dofs.cell_u_offset(c) + na, na) = vy;
    }
    const int order = 2 * s.beta + 2 + extra_order;
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const Edge& ed = mesh.edge(e);
        if (ed.on_boundary())
            continue;
        const Point& a = mesh.vertex(ed.v0);
        const Point& b = mesh.vertex(ed.v1);
        if (mesh.is_interface(e)) {
            for (int side : {1, 2}) {
                out.segment(dofs.edge_block(e, side), dofs.n_edge())
                    = l2_project_edge_normal([&](const Point& x) { return v(side, x); }, a, b, ed.normal, s.beta, order);
            }
        } else {
            const int side = mesh.label(ed.left);
            out.segment(dofs.edge_block(e, side), dofs.n_edge())
                = l2_project_edge_normal([&](const Point& x) { return v(side, x); }, a, b, ed.normal, s.beta, order);
        }
    }
    return out;
}

} // namespace wgmfem
