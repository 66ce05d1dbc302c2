#pragma once

#include "wgmfem/femcore.hpp"

namespace wgmfem {

/// Global numbering of the discrete unknowns.
///
/// Velocity: per cell 2 n_alpha interior coefficients, then edge blocks of beta+1 scalars.
/// Interior edges own one block; interface edges own one block per side; boundary edges own none.
/// Pressure unknowns are numbered separately, n_sigma per cell.
class WgDofMap {
public:
    WgDofMap() = default;
    WgDofMap(const PolyMesh& mesh, const Spaces& spaces);

    const Spaces& spaces() const { return spaces_; }
    int n_u() const { return n_u_; }
    int n_p() const { return n_p_; }
    int n_alpha() const { return poly_dim(spaces_.alpha); }
    int n_sigma() const { return poly_dim(spaces_.sigma); }
    int n_edge() const { return spaces_.beta + 1; }
    int num_cells() const { return static_cast<int>(cell_labels_.size()); }

    int cell_u_offset(int c) const { return 2 * n_alpha() * c; }
    int cell_p_offset(int c) const { return n_sigma() * c; }
    /// Offset of the edge block seen from region `side`, or -1 on the boundary.
    int edge_block(int edge, int side) const;
    /// Edge block used by cell c on its local edge j.
    int cell_edge_block(const PolyMesh& mesh, int c, int j) const;
    /// Global velocity index of every local dof of cell c (CellOperator layout), -1 where eliminated.
    std::vector<int> local_u_dofs(const PolyMesh& mesh, int c) const;

private:
    Spaces spaces_;
    int n_u_ = 0, n_p_ = 0;
    std::vector<std::array<int, 2>> edge_blocks_;
    std::vector<int> cell_labels_;
};

/// Q_h v = {Q_0 v, Q_b v}.  `v(side, x)` evaluates the region-`side` field (its natural extension
/// off that region); cells and interface edge blocks use the field of their own side.
Eigen::VectorXd project_wg(const std::function<Vec2(int, const Point&)>& v, const PolyMesh& mesh, const WgDofMap& dofs,
                           int extra_order = 0);

} // namespace wgmfem
