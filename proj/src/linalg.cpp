#include "mmfem/linalg.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace mmfem
{

Vector matvec(const SparseMatrix& A, const Vector& x)
{
  if (A.cols() != x.size())
    throw std::invalid_argument("matvec: matrix has " + std::to_string(A.cols())
                                + " columns but vector has " + std::to_string(x.size())
                                + " entries");
  return A * x;
}

SolveReport cg_solve(const SparseMatrix& A, const Vector& b, Vector& x, const CGOptions& options)
{
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n)
    throw std::invalid_argument("cg_solve: dimension mismatch");
  if (!options.use_initial_guess || x.size() != n)
    x = Vector::Zero(n);

  Vector inv_diag = Vector::Ones(n);
  if (options.preconditioner == Preconditioner::jacobi)
  {
    const Vector d = A.diagonal();
    for (Eigen::Index k = 0; k < n; ++k)
      inv_diag[k] = d[k] != 0.0 ? 1.0 / d[k] : 1.0;
  }

  SolveReport report;
  const double bnorm = b.norm();
  if (bnorm == 0.0)
  {
    x.setZero();
    report.converged = true;
    return report;
  }

  // Restarts from the true residual whenever the recurrence residual has
  // drifted below the tolerance without the true one following.
  Vector r(n), z(n), p(n), q(n);
  for (int restart = 0; restart < 5; ++restart)
  {
    r = b - A * x;
    report.relative_residual = r.norm() / bnorm;
    if (report.relative_residual <= options.rtol || report.iterations >= options.max_iterations)
      break;

    z = inv_diag.cwiseProduct(r);
    p = z;
    double rz = r.dot(z);
    while (report.iterations < options.max_iterations)
    {
      q.noalias() = A * p;
      const double pq = p.dot(q);
      if (!(pq > 0.0))
        break; // not positive definite along p
      const double alpha = rz / pq;
      x += alpha * p;
      r -= alpha * q;
      ++report.iterations;
      if (options.monitor)
        options.monitor(report.iterations, x);
      if (r.norm() <= options.rtol * bnorm)
        break;

      z = inv_diag.cwiseProduct(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
  }

  report.relative_residual = (b - A * x).norm() / bnorm;
  report.converged = report.relative_residual <= options.rtol;
  return report;
}

Vector dense_lu_solve(Eigen::MatrixXd A, Vector b)
{
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n)
    throw std::invalid_argument("dense_lu_solve: dimension mismatch");

  const double scale = A.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < n; ++k)
  {
    Eigen::Index pivot;
    const double largest = A.col(k).tail(n - k).cwiseAbs().maxCoeff(&pivot);
    pivot += k;
    if (!(largest > 1e-14 * scale))
      throw std::runtime_error("dense_lu_solve: matrix is singular (pivot "
                               + std::to_string(k) + ")");
    if (pivot != k)
    {
      A.row(k).swap(A.row(pivot));
      std::swap(b[k], b[pivot]);
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
    {
      const double factor = A(i, k) / A(k, k);
      if (factor == 0.0)
        continue;
      A.row(i).tail(n - k) -= factor * A.row(k).tail(n - k);
      b[i] -= factor * b[k];
    }
  }

  Vector x(n);
  for (Eigen::Index k = n - 1; k >= 0; --k)
    x[k] = (b[k] - A.row(k).tail(n - k - 1).dot(x.tail(n - k - 1))) / A(k, k);
  return x;
}

SparseMatrix restrict_matrix(const SparseMatrix& A, std::span<const int> keep)
{
  std::vector<int> position(A.rows(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k)
    position[keep[k]] = static_cast<int>(k);

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < keep.size(); ++k)
    for (SparseMatrix::InnerIterator it(A, keep[k]); it; ++it)
      if (position[it.col()] >= 0)
        triplets.emplace_back(static_cast<int>(k), position[it.col()], it.value());

  const auto n = static_cast<Eigen::Index>(keep.size());
  SparseMatrix R(n, n);
  R.setFromTriplets(triplets.begin(), triplets.end());
  return R;
}

ConditionEstimate estimate_condition_number(const SparseMatrix& A,
                                            const std::vector<bool>& excluded, double rtol)
{
  std::vector<int> keep;
  for (Eigen::Index k = 0; k < A.rows(); ++k)
    if (k >= static_cast<Eigen::Index>(excluded.size()) || !excluded[k])
      keep.push_back(static_cast<int>(k));
  const SparseMatrix R = restrict_matrix(A, keep);
  const Eigen::Index n = R.rows();

  ConditionEstimate estimate;
  if (n == 0)
    return estimate;

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Vector start(n);
  for (Eigen::Index k = 0; k < n; ++k)
    start[k] = uniform(rng);
  start.normalize();

  // Power iteration with Rayleigh quotients.
  {
    Vector v = start;
    double lambda = 0.0;
    const int max_iterations = 50000;
    for (int it = 1; it <= max_iterations; ++it)
    {
      Vector w = R * v;
      const double next = v.dot(w);
      v = w / w.norm();
      estimate.power_iterations = it;
      if (it > 1 && std::abs(next - lambda) <= rtol * std::abs(next))
      {
        lambda = next;
        break;
      }
      lambda = next;
    }
    estimate.lambda_max = lambda;
  }

  // Inverse power iteration; each step is an inner CG solve.
  {
    Vector v = start;
    Vector w = Vector::Zero(n);
    double lambda = 0.0;
    CGOptions options;
    options.rtol = std::min(1e-10, rtol * 1e-2);
    options.use_initial_guess = true;
    for (int it = 1; it <= 1000; ++it)
    {
      const auto report = cg_solve(R, v, w, options);
      if (!report.converged)
        throw std::runtime_error("estimate_condition_number: inner solve did not converge");
      const double next = 1.0 / v.dot(w); // v has unit norm
      v = w / w.norm();
      w = v / next;
      estimate.inverse_iterations = it;
      if (it > 1 && std::abs(next - lambda) <= rtol * std::abs(next))
      {
        lambda = next;
        break;
      }
      lambda = next;
    }
    estimate.lambda_min = lambda;
  }

  estimate.kappa = estimate.lambda_max / estimate.lambda_min;
  return estimate;
}

} // namespace mmfem
