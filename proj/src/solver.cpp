#include "wgmfem/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <limits>

#include <umfpack.h>

namespace wgmfem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string umfpack_status(int status)
{
    switch (status) {
    case UMFPACK_ERROR_out_of_memory:
        return "out of memory";
    case UMFPACK_ERROR_invalid_matrix:
        return "invalid matrix";
    case UMFPACK_WARNING_singular_matrix:
        return "singular matrix";
    default:
        return "status " + std::to_string(status);
    }
}

template <class Inverse>
Eigen::VectorXd refine(const SparseMatrix& m, const Inverse& inverse, const Eigen::VectorXd& b, SolveReport& report)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double bnorm = b.norm();
    const double scale = bnorm > 0.0 ? bnorm : 1.0;
    Eigen::VectorXd x = inverse(b);
    Eigen::VectorXd r = b - m * x;
    double res = r.norm() / scale;
    int steps = 0;
    for (; steps < 5 && res > 1e-15; ++steps) {
        const Eigen::VectorXd y = x + inverse(r);
        const Eigen::VectorXd ry = b - m * y;
        const double res_y = ry.norm() / scale;
        if (!(res_y < res))
            break;
        x = y;
        r = ry;
        res = res_y;
    }
    report.residual = std::isfinite(res) ? res : std::numeric_limits<double>::infinity();
    report.rhs_norm = bnorm;
    report.refinement_steps = steps;
    report.solve_seconds = seconds_since(t0);
    return x;
}

} // namespace

SparseLU::SparseLU(const SparseMatrix& m) : m_(m)
{
    if (m_.rows() != m_.cols())
        throw SolverError("SparseLU: matrix is not square");
    m_.makeCompressed();
    report_.n = static_cast<int>(m_.rows());
    report_.nnz = m_.nonZeros();
    if (factor_umfpack() && probe())
        return;
    if (numeric_)
        umfpack_di_free_numeric(&numeric_);
    factor_eigen();
    if (!probe())
        throw SolverError("sparse LU: matrix is numerically singular");
}

bool SparseLU::factor_umfpack()
{
    const auto t0 = std::chrono::steady_clock::now();
    double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
    umfpack_di_defaults(control);
    void* symbolic = nullptr;
    int status = umfpack_di_symbolic(report_.n, report_.n, m_.outerIndexPtr(), m_.innerIndexPtr(), m_.valuePtr(),
                                     &symbolic, control, info);
    if (status != UMFPACK_OK)
        throw SolverError("sparse LU symbolic analysis failed: " + umfpack_status(status));
    status = umfpack_di_numeric(m_.outerIndexPtr(), m_.innerIndexPtr(), m_.valuePtr(), symbolic, &numeric_, control, info);
    umfpack_di_free_symbolic(&symbolic);
    if (status == UMFPACK_ERROR_out_of_memory)
        throw SolverError("sparse LU factorization failed: out of memory");

    report_.backend = "umfpack";
    report_.lu_nnz = static_cast<long long>(info[UMFPACK_LNZ] + info[UMFPACK_UNZ]);
    report_.rcond = info[UMFPACK_RCOND];
    report_.min_pivot = info[UMFPACK_UMIN];
    report_.factor_seconds = seconds_since(t0);
    return status == UMFPACK_OK && report_.min_pivot > 0.0;
}

void SparseLU::factor_eigen()
{
    const auto t0 = std::chrono::steady_clock::now();
    eigen_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    eigen_->compute(m_);
    if (eigen_->info() != Eigen::Success)
        throw SolverError("sparse LU: matrix is singular (" + eigen_->lastErrorMessage() + ")");
    report_.backend = "eigen";
    report_.lu_nnz = static_cast<long long>(eigen_->nnzL() + eigen_->nnzU());
    report_.rcond = -1.0;
    report_.min_pivot = -1.0;
    report_.factor_seconds = seconds_since(t0);
}

bool SparseLU::probe() const
{
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(m_.rows(), 1.0, 2.0);
    const Eigen::VectorXd b = m_ * x;
    const Eigen::VectorXd y = apply_inverse(b);
    return y.allFinite() && (m_ * y - b).norm() <= 1e-6 * b.norm();
}

SparseLU::~SparseLU()
{
    if (numeric_)
        umfpack_di_free_numeric(&numeric_);
}

Eigen::VectorXd SparseLU::apply_inverse(const Eigen::VectorXd& b) const
{
    if (b.size() != m_.rows())
        throw SolverError("SparseLU: right-hand side has the wrong size");
    if (eigen_)
        return eigen_->solve(b);
    double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
    umfpack_di_defaults(control);
    control[UMFPACK_IRSTEP] = 0;
    Eigen::VectorXd x(b.size());
    const int status = umfpack_di_solve(UMFPACK_A, m_.outerIndexPtr(), m_.innerIndexPtr(), m_.valuePtr(), x.data(),
                                        b.data(), numeric_, control, info);
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
        throw SolverError("sparse LU solve failed: " + umfpack_status(status));
    return x;
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b, SolveReport* report) const
{
    SolveReport r = report_;
    Eigen::VectorXd x = refine(m_, [this](const Eigen::VectorXd& v) { return apply_inverse(v); }, b, r);
    if (report)
        *report = r;
    return x;
}

WgSolution solve(const SaddleSystem& system)
{
    const int n = system.size();
    const int last = n - 1;
    int pin = 0;
    system.c.cwiseAbs().maxCoeff(&pin);
    if (!(system.c[pin] != 0.0))
        throw SolverError("mean-value constraint vector is zero");

    SaddleSystem pinned_system = system;
    pinned_system.c.setZero();
    pinned_system.c[pin] = system.c[pin];
    const SparseLU lu(pinned_system.matrix());

    // M = M_pin + u e_n^T + e_n u^T with u the dropped part of the border.
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, 2);
    U.col(0).segment(system.n_u(), system.n_p()) = system.c - pinned_system.c;
    U(last, 1) = 1.0;
    Eigen::MatrixXd Z(n, 2);
    Z.col(0) = lu.apply_inverse(U.col(0));
    Z.col(1) = lu.apply_inverse(U.col(1));
    // V^T Z with V = [e_n, u].
    Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
    S.row(0) += Z.row(last);
    S.row(1) += U.col(0).transpose() * Z;
    const Eigen::FullPivLU<Eigen::Matrix2d> small(S);
    if (!small.isInvertible())
        throw SolverError("bordered system is singular");
    auto inverse = [&](const Eigen::VectorXd& b) {
        const Eigen::VectorXd z = lu.apply_inverse(b);
        const Eigen::Vector2d vz(z[last], U.col(0).dot(z));
        return Eigen::VectorXd(z - Z * small.solve(vz));
    };

    const SparseMatrix m = system.matrix();
    WgSolution sol;
    sol.report = lu.factor_report();
    sol.report.nnz = m.nonZeros();
    const Eigen::VectorXd x = refine(m, inverse, system.rhs(), sol.report);
    if (!(sol.report.residual < 1e-10))
        throw SolverError("linear solve residual " + std::to_string(sol.report.residual) + " exceeds 1e-10");
    sol.u = x.head(system.n_u());
    sol.p = x.segment(system.n_u(), system.n_p());
    sol.multiplier = x[last];
    return sol;
}

double infsup_probe(const SaddleSystem& system, int max_dofs)
{
    if (system.n_u() + system.n_p() > max_dofs)
        throw SolverError("inf-sup probe: " + std::to_string(system.n_u() + system.n_p()) + " dofs exceed the budget of "
                          + std::to_string(max_dofs));
    const Eigen::MatrixXd a = Eigen::MatrixXd(system.A);
    const Eigen::MatrixXd b = Eigen::MatrixXd(system.B1);
    const Eigen::MatrixXd mp = Eigen::MatrixXd(system.Mp);
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
        throw SolverError("inf-sup probe: energy Gram matrix is not positive definite");
    Eigen::MatrixXd s = b * llt.solve(b.transpose());
    s = 0.5 * (s + s.transpose()).eval();
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(s, mp, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw SolverError("inf-sup probe: eigenvalue solve failed");
    // The constant pressure spans the kernel of B1^T; skip it.
    const Eigen::VectorXd ev = es.eigenvalues();
    return std::sqrt(std::max(ev[1], 0.0));
}

Eigen::VectorXd singular_values(const SparseMatrix& m)
{
    const Eigen::MatrixXd dense(m);
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
    return svd.singularValues();
}

} // namespace wgmfem
