#pragma once

#include "wgmfem/mesh.hpp"
#include "wgmfem/polynomial.hpp"
#include "wgmfem/quadrature.hpp"

#include <functional>

namespace wgmfem {

/// Polynomial degrees of the discrete spaces: v0 in [P_alpha]^2, v_b in P_beta(e), p in P_sigma.
struct Spaces {
    int alpha = 1;
    int beta = 1;
    int sigma = 0;

    /// alpha = beta = k, sigma = k - 1.
    static Spaces from_degree(int k);
    int k() const { return std::max(alpha, beta); }
    void validate() const;
    bool operator==(const Spaces&) const = default;
};

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Vec2(const Point&)>;

/// Local WG operators of one cell.  Local dof layout:
/// [v0_x (n_alpha) | v0_y (n_alpha) | v_b on local edge 0 (beta+1) | local edge 1 | ...].
/// Edge coefficients refer to the edge's prescribed normal n_e.
class CellOperator {
public:
    CellOperator(const PolyMesh& mesh, int cell, const Spaces& spaces, int quad_order);

    int cell() const { return cell_; }
    int n_alpha() const { return basis_alpha_.dim(); }
    int n_beta() const { return basis_beta_.dim(); }
    int n_sigma() const { return poly_dim(spaces_.sigma); }
    int n_edge() const { return spaces_.beta + 1; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int local_size() const { return 2 * n_alpha() + num_edges() * n_edge(); }
    int edge_offset(int j) const { return 2 * n_alpha() + j * n_edge(); }

    const ScaledMonomialBasis& basis_alpha() const { return basis_alpha_; }
    /// P_beta basis; its first n_sigma functions span P_sigma.
    const ScaledMonomialBasis& basis_beta() const { return basis_beta_; }
    const EdgeBasis& edge_basis(int j) const { return edge_bases_[j]; }
    const CellEdge& cell_edge(int j) const { return edges_[j]; }
    /// Outward unit normal of the cell on local edge j.
    Vec2 outward_normal(int j) const;
    const QuadratureRule& quadrature() const { return quad_; }
    QuadratureRule edge_quadrature_rule(int j, int order) const;

    const Eigen::MatrixXd& mass_alpha() const { return mass_alpha_; }
    const Eigen::MatrixXd& mass_beta() const { return mass_beta_; }
    /// Coefficients of the weak divergence in basis_beta(): div = W * local_dofs.
    const Eigen::MatrixXd& weak_div() const { return weak_div_; }

private:
    const PolyMesh* mesh_;
    int cell_;
    Spaces spaces_;
    int quad_order_;
    ScaledMonomialBasis basis_alpha_, basis_beta_;
    std::vector<CellEdge> edges_;
    std::vector<EdgeBasis> edge_bases_;
    QuadratureRule quad_;
    Eigen::MatrixXd mass_alpha_, mass_beta_, weak_div_;
};

Eigen::MatrixXd mass_matrix(const ScaledMonomialBasis& basis, const QuadratureRule& q);

/// L2(K) projection onto P_degree in the cell's scaled monomial basis (quadrature of order 2 degree + 2 + extra).
Eigen::VectorXd l2_project_cell(const ScalarField& f, const PolyMesh& mesh, int cell, int degree, int extra_order = 0);

/// Scalar L2(e) projection of v . n_e onto P_degree(e), coefficients in EdgeBasis.
Eigen::VectorXd l2_project_edge_normal(const VectorField& v, const Point& a, const Point& b, const Vec2& normal, int degree,
                                       int order);

/// P_beta coefficients of the weak divergence for local dofs in the CellOperator layout.
Eigen::VectorXd weak_divergence(const CellOperator& op, const Eigen::VectorXd& local_dofs);

enum class TaylorVariant { T, T1 };
enum class TaylorMode {
    Fast,    ///< evaluate at the foot when the order covers the polynomial degree
    Explicit ///< sum of directional derivatives along nu
};

/// Values at x_h of T^m (or T1^m) applied to every basis function.
Eigen::VectorXd taylor_basis_values(const ScaledMonomialBasis& basis, const Point& x_h, const ProjectionData& pd, int m,
                                    TaylorVariant variant, TaylorMode mode = TaylorMode::Fast);

/// T^m p(x_h) or T1^m p(x_h) for the polynomial p = coeffs . basis.
double taylor_correct(const ScaledMonomialBasis& basis, const Eigen::VectorXd& coeffs, const Point& x_h,
                      const ProjectionData& pd, int m, TaylorVariant variant, TaylorMode mode = TaylorMode::Fast);

} // namespace wgmfem
