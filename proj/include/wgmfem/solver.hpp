#pragma once

#include "wgmfem/assembly.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <string>

namespace wgmfem {

class SolverError : public Error {
public:
    using Error::Error;
};

struct SolveReport {
    std::string backend;         ///< "umfpack" or "eigen"
    int n = 0;
    long long nnz = 0;
    long long lu_nnz = 0;        ///< entries of L plus U
    double rcond = 0.0;          ///< min |U_ii| / max |U_ii|; -1 when the backend does not report it
    double min_pivot = 0.0;      ///< -1 when the backend does not report it
    double residual = 0.0;       ///< ||M x - b|| / ||b||, absolute when b = 0
    double rhs_norm = 0.0;
    int refinement_steps = 0;
    double factor_seconds = 0.0;
    double solve_seconds = 0.0;
};

/// Sparse LU with partial pivoting.  UMFPACK is tried first; if its factors fail a residual probe
/// (seen with some optimized BLAS kernels) Eigen's SparseLU takes over.  Factorization happens in
/// the constructor; a singular matrix throws SolverError.
class SparseLU {
public:
    explicit SparseLU(const SparseMatrix& m);
    ~SparseLU();
    SparseLU(const SparseLU&) = delete;
    SparseLU& operator=(const SparseLU&) = delete;

    /// One forward/back substitution, no refinement.
    Eigen::VectorXd apply_inverse(const Eigen::VectorXd& b) const;
    /// Solves with iterative refinement until the relative residual stops improving.
    Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveReport* report = nullptr) const;
    const SolveReport& factor_report() const { return report_; }
    const SparseMatrix& matrix() const { return m_; }

private:
    bool factor_umfpack();
    void factor_eigen();
    bool probe() const;

    SparseMatrix m_;
    void* numeric_ = nullptr;
    std::unique_ptr<Eigen::SparseLU<SparseMatrix>> eigen_;
    SolveReport report_;
};

struct WgSolution {
    Eigen::VectorXd u;   ///< velocity dofs (interior then edge blocks); boundary edges carry none
    Eigen::VectorXd p;   ///< pressure dofs
    double multiplier = 0.0;
    SolveReport report;
};

/// Solves the bordered system.  The dense mean-value border is replaced by a single pressure
/// pin for the factorization and restored exactly by a rank-two update.  Throws SolverError on a singular factorization or when the
/// relative residual exceeds 1e-10.
WgSolution solve(const SaddleSystem& system);

/// sqrt of the smallest nonzero generalized eigenvalue of B1 A^{-1} B1^T against the pressure mass
/// matrix: the discrete inf-sup constant of b_h1 in the energy norm.  Dense; limited to max_dofs.
double infsup_probe(const SaddleSystem& system, int max_dofs = 5000);

/// Singular values of a dense copy of a matrix, descending.
Eigen::VectorXd singular_values(const SparseMatrix& m);

} // namespace wgmfem
