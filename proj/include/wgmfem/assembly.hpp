#pragma once

#include "wgmfem/dofmap.hpp"

#include <Eigen/Sparse>

namespace wgmfem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Coefficients and data of the interface problem.
struct ProblemData {
    std::array<double, 2> kappa{1.0, 1.0};
    /// Source of region `side`, evaluated anywhere on cells of that label.
    std::function<double(int side, const Point&)> f;
    /// Jump data on the curve: g_D = p1 - p2, g_N = (u1 - u2) . n.
    ScalarField g_D;
    ScalarField g_N;
};

struct AssemblyOptions {
    bool correction = true;
    TaylorMode taylor = TaylorMode::Fast;
    double eta = 1.0;
    double rho = 1.0;
    int quad_bump = 0;
    /// Worker threads; 0 reads WG_THREADS (default 1).
    int threads = 0;

    int poly_order(int k) const { return 2 * k + 2 + quad_bump; }
    int data_order(int k) const { return 2 * k + 4 + quad_bump; }
};

/// Worker count from WG_THREADS, at least 1.
int default_threads();

/// Quadrature and projection data of one edge of Gamma_h.
struct InterfaceEdgeData {
    int edge = 0;
    int cell1 = 0, cell2 = 0;
    double sign = 1.0;   ///< n_e . n_h
    Vec2 n_h = Vec2::Zero();
    double h_e = 0.0;    ///< mean diameter of the two cells
    QuadratureRule quad;
    std::vector<ProjectionData> proj;
};

std::vector<InterfaceEdgeData> build_interface_data(const PolyMesh& mesh, const InterfaceCurve& curve, int order);

/// Blocks of the discrete problem.  B1 and B0 are n_p x n_u with B(q, v) = b(v, q).
struct SaddleSystem {
    WgDofMap dofs;
    SparseMatrix A, B1, B0;
    Eigen::VectorXd c;  ///< c_q = integral of pressure basis function q over Omega_h
    Eigen::VectorXd F, G;
    SparseMatrix Mp;    ///< pressure mass matrix

    int n_u() const { return dofs.n_u(); }
    int n_p() const { return dofs.n_p(); }
    int size() const { return n_u() + n_p() + 1; }

    /// [[A, B1^T, 0], [B0, 0, c], [0, c^T, 0]].
    SparseMatrix matrix() const;
    /// [[A, B1^T], [B0, 0]] without the mean constraint.
    SparseMatrix unconstrained_matrix() const;
    Eigen::VectorXd rhs() const;
};

/// Holds the geometry-dependent state shared by the assembly routines.
class Assembler {
public:
    Assembler(const PolyMesh& mesh, const InterfaceCurve& curve, const Spaces& spaces, AssemblyOptions options = {});

    const PolyMesh& mesh() const { return *mesh_; }
    const WgDofMap& dofs() const { return dofs_; }
    const Spaces& spaces() const { return spaces_; }
    const AssemblyOptions& options() const { return options_; }
    const std::vector<InterfaceEdgeData>& interface_data() const { return iface_; }

    /// a_h: kappa^{-1} mass, weak divergence stiffness, interface penalty, stabilizer.
    SparseMatrix assemble_a(const std::array<double, 2>& kappa) const;
    /// Only the interface penalty part of a_h.
    SparseMatrix assemble_interface_penalty() const;
    /// B1 from b_h1 and B0 from b_h0.
    std::pair<SparseMatrix, SparseMatrix> assemble_b() const;
    /// F from l(v) and G = -(f, q).
    std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_rhs(const ProblemData& data) const;
    /// c and the pressure mass matrix.
    std::pair<Eigen::VectorXd, SparseMatrix> assemble_pressure_mass() const;

    SaddleSystem assemble(const ProblemData& data) const;

private:
    const PolyMesh* mesh_;
    const InterfaceCurve* curve_;
    Spaces spaces_;
    AssemblyOptions options_;
    WgDofMap dofs_;
    std::vector<InterfaceEdgeData> iface_;
};

/// Appends the mean-value row/column; returns the bordered matrix of the system.
SparseMatrix attach_mean_constraint(const SaddleSystem& system);

/// Matrix Market coordinate dump of the bordered matrix.
void dump_system(const SaddleSystem& system, const std::string& path);

} // namespace wgmfem
