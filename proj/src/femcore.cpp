#include "wgmfem/femcore.hpp"

#include <cmath>

namespace wgmfem {

Spaces Spaces::from_degree(int k)
{
    Spaces s{k, k, k - 1};
    s.validate();
    return s;
}

void Spaces::validate() const
{
    if (alpha < 0 || beta < 0 || sigma < 0)
        throw Error("spaces: polynomial degrees must be nonnegative (k >= 1)");
    if (sigma > beta)
        throw Error("spaces: the pressure degree may not exceed the weak divergence degree");
}

CellOperator::CellOperator(const PolyMesh& mesh, int cell, const Spaces& spaces, int quad_order)
    : mesh_(&mesh), cell_(cell), spaces_(spaces), quad_order_(quad_order)
{
    const Point xc = mesh.cell_centroid(cell);
    const double hk = mesh.cell_diameter(cell);
    basis_alpha_ = ScaledMonomialBasis(xc, hk, spaces.alpha);
    basis_beta_ = ScaledMonomialBasis(xc, hk, spaces.beta);
    edges_ = mesh.cell_edges(cell);
    for (const auto& ce : edges_) {
        const Edge& e = mesh.edge(ce.edge);
        edge_bases_.emplace_back(mesh.vertex(e.v0), mesh.vertex(e.v1), spaces.beta);
    }
    const auto pts = mesh.cell_points(cell);
    quad_ = cell_quadrature(pts, quad_order);
    mass_alpha_ = mass_matrix(basis_alpha_, quad_);
    mass_beta_ = mass_matrix(basis_beta_, quad_);

    const int na = n_alpha(), nb = n_beta();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb, local_size());
    Eigen::VectorXd ma(na);
    for (std::size_t i = 0; i < quad_.size(); ++i) {
        const auto g = basis_beta_.grad(quad_.points[i]);
        basis_alpha_.eval(quad_.points[i], ma);
        const double w = quad_.weights[i];
        rhs.block(0, 0, nb, na).noalias() -= w * g.row(0).transpose() * ma.transpose();
        rhs.block(0, na, nb, na).noalias() -= w * g.row(1).transpose() * ma.transpose();
    }
    Eigen::VectorXd mb(nb), psi(n_edge());
    for (int j = 0; j < num_edges(); ++j) {
        const auto eq = edge_quadrature_rule(j, quad_order);
        for (std::size_t i = 0; i < eq.size(); ++i) {
            basis_beta_.eval(eq.points[i], mb);
            edge_bases_[j].eval(eq.points[i], psi);
            rhs.block(0, edge_offset(j), nb, n_edge()).noalias() += eq.weights[i] * edges_[j].sign * mb * psi.transpose();
        }
    }
    weak_div_ = mass_beta_.llt().solve(rhs);
}

Vec2 CellOperator::outward_normal(int j) const { return edges_[j].sign * mesh_->edge(edges_[j].edge).normal; }

QuadratureRule CellOperator::edge_quadrature_rule(int j, int order) const
{
    const Edge& e = mesh_->edge(edges_[j].edge);
    return edge_quadrature(mesh_->vertex(e.v0), mesh_->vertex(e.v1), order);
}

Eigen::MatrixXd mass_matrix(const ScaledMonomialBasis& basis, const QuadratureRule& q)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
    Eigen::VectorXd v(basis.dim());
    for (std::size_t i = 0; i < q.size(); ++i) {
        basis.eval(q.points[i], v);
        m.noalias() += q.weights[i] * v * v.transpose();
    }
    return m;
}

Eigen::VectorXd l2_project_cell(const ScalarField& f, const PolyMesh& mesh, int cell, int degree, int extra_order)
{
    const ScaledMonomialBasis basis(mesh.cell_centroid(cell), mesh.cell_diameter(cell), degree);
    const auto q = cell_quadrature(mesh.cell_points(cell), 2 * degree + 2 + extra_order);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(basis.dim());
    Eigen::VectorXd v(basis.dim());
    for (std::size_t i = 0; i < q.size(); ++i) {
        basis.eval(q.points[i], v);
        b += q.weights[i] * f(q.points[i]) * v;
    }
    return mass_matrix(basis, q).llt().solve(b);
}

Eigen::VectorXd l2_project_edge_normal(const VectorField& v, const Point& a, const Point& b, const Vec2& normal, int degree,
                                       int order)
{
    const EdgeBasis basis(a, b, degree);
    const auto q = edge_quadrature(a, b, order);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.dim());
    Eigen::VectorXd psi(basis.dim());
    for (std::size_t i = 0; i < q.size(); ++i) {
        basis.eval(q.points[i], psi);
        c += q.weights[i] * v(q.points[i]).dot(normal) * psi;
    }
    return c;
}

Eigen::VectorXd weak_divergence(const CellOperator& op, const Eigen::VectorXd& local_dofs)
{
    if (local_dofs.size() != op.local_size())
        throw Error("weak_divergence: local dof vector has the wrong size");
    return op.weak_div() * local_dofs;
}

Eigen::VectorXd taylor_basis_values(const ScaledMonomialBasis& basis, const Point& x_h, const ProjectionData& pd, int m,
                                    TaylorVariant variant, TaylorMode mode)
{
    if (m < 0)
        throw Error("taylor correction: negative expansion order");
    if (mode == TaylorMode::Fast && m >= basis.degree()) {
        Eigen::VectorXd v = basis.eval(pd.foot);
        if (variant == TaylorVariant::T1)
            v -= basis.eval(x_h);
        return v;
    }
    // Row vector r_j = m(x_h)^T D^j, so that r_j . c = d^j p / d nu^j at x_h.
    const Eigen::MatrixXd d = pd.nu.x() * basis.dx_matrix() + pd.nu.y() * basis.dy_matrix();
    Eigen::VectorXd r = basis.eval(x_h);
    Eigen::VectorXd out = variant == TaylorVariant::T ? r : Eigen::VectorXd::Zero(basis.dim());
    double factor = 1.0;
    for (int j = 1; j <= std::min(m, basis.degree()); ++j) {
        r = d.transpose() * r;
        factor *= pd.delta / j;
        out += factor * r;
    }
    return out;
}

double taylor_correct(const ScaledMonomialBasis& basis, const Eigen::VectorXd& coeffs, const Point& x_h,
                      const ProjectionData& pd, int m, TaylorVariant variant, TaylorMode mode)
{
    return taylor_basis_values(basis, x_h, pd, m, variant, mode).dot(coeffs);
}

} // namespace wgmfem
