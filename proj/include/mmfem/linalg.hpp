#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <span>
#include <vector>

namespace mmfem
{

/// Compressed sparse row storage (row offsets, sorted column indices, values).
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Vector = Eigen::VectorXd;

/// y = A x. Throws std::invalid_argument on a dimension mismatch.
Vector matvec(const SparseMatrix& A, const Vector& x);

enum class Preconditioner
{
  none,
  jacobi
};

struct SolveReport
{
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct CGOptions
{
  Preconditioner preconditioner = Preconditioner::jacobi;
  double rtol = 1e-12;
  int max_iterations = 20000;
  bool use_initial_guess = false;
  /// Called after every iteration with the current iterate.
  std::function<void(int, const Vector&)> monitor;
};

/// Preconditioned conjugate gradients for symmetric positive definite A.
/// Convergence means ||b - A x|| <= rtol ||b||; failure to converge is
/// reported through SolveReport::converged, never thrown.
SolveReport cg_solve(const SparseMatrix& A, const Vector& b, Vector& x,
                     const CGOptions& options = {});

/// LU with partial pivoting. Throws std::runtime_error when a pivot falls
/// below 1e-14 max|A|.
Vector dense_lu_solve(Eigen::MatrixXd A, Vector b);

struct ConditionEstimate
{
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double kappa = 0.0;
  int power_iterations = 0;
  int inverse_iterations = 0;
};

/// Rows and columns `keep` of A, in that order.
SparseMatrix restrict_matrix(const SparseMatrix& A, std::span<const int> keep);

/// lambda_max by power iteration and lambda_min by inverse power iteration
/// (inner CG solves) on the rows/columns not flagged in `excluded`.
/// Throws std::runtime_error if an inner solve fails.
ConditionEstimate estimate_condition_number(const SparseMatrix& A,
                                            const std::vector<bool>& excluded,
                                            double rtol = 1e-8);

} // namespace mmfem
