#include "mmfem/linalg.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace mmfem;

namespace
{

Eigen::MatrixXd random_spd(int n, unsigned seed, double shift = 1.0)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      B(i, j) = g(rng);
  return B * B.transpose() / n + shift * Eigen::MatrixXd::Identity(n, n);
}

SparseMatrix sparse(const Eigen::MatrixXd& A)
{
  return A.sparseView();
}

Vector random_vector(int n, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i)
    v[i] = g(rng);
  return v;
}

} // namespace

TEST_CASE("matvec")
{
  SparseMatrix I(5, 5);
  I.setIdentity();
  const Vector x = random_vector(5, 1);
  CHECK(matvec(I, x) == x);
  CHECK(matvec(SparseMatrix(5, 5), x).isZero());

  const Eigen::MatrixXd D = random_spd(50, 2) - 3 * Eigen::MatrixXd::Identity(50, 50);
  const Vector y = random_vector(50, 3);
  CHECK((matvec(sparse(D), y) - D * y).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(matvec(I, Vector::Ones(4)), std::invalid_argument);
}

TEST_CASE("conjugate gradients")
{
  SparseMatrix I(6, 6);
  I.setIdentity();
  const Vector b = random_vector(6, 4);
  Vector x;
  auto r = cg_solve(I, b, x);
  CHECK(r.converged);
  CHECK(r.iterations <= 1);
  CHECK((x - b).norm() < 1e-14);

  Eigen::MatrixXd A2(2, 2);
  A2 << 4, 1, 1, 3;
  r = cg_solve(sparse(A2), Vector(Eigen::Vector2d(1, 2)), x);
  CHECK(r.converged);
  CHECK(std::abs(x[0] - 1.0 / 11) < 1e-12);
  CHECK(std::abs(x[1] - 7.0 / 11) < 1e-12);

  const Eigen::MatrixXd A = random_spd(100, 5, 0.1);
  const Vector rhs = random_vector(100, 6);
  for (auto pc : {Preconditioner::none, Preconditioner::jacobi})
  {
    CGOptions opt;
    opt.preconditioner = pc;
    r = cg_solve(sparse(A), rhs, x, opt);
    CHECK(r.converged);
    CHECK(r.relative_residual <= 1e-12);
    CHECK((x - dense_lu_solve(A, rhs)).norm() < 1e-9 * x.norm());
  }

  CGOptions few;
  few.max_iterations = 3;
  r = cg_solve(sparse(A), rhs, x, few);
  CHECK_FALSE(r.converged);
  CHECK(r.relative_residual > 1e-12);

  CHECK(cg_solve(sparse(A), Vector::Zero(100), x).converged);
  CHECK(x.isZero());
}

TEST_CASE("cg error decreases monotonically in the energy norm")
{
  const Eigen::MatrixXd A = random_spd(60, 7, 0.05);
  const Vector b = random_vector(60, 8);
  const Vector exact = A.llt().solve(b);
  double previous = std::sqrt(exact.dot(A * exact));
  bool monotone = true;
  CGOptions opt;
  opt.preconditioner = Preconditioner::none;
  opt.monitor = [&](int, const Vector& x) {
    const Vector e = x - exact;
    const double energy = std::sqrt(e.dot(A * e));
    monotone = monotone && energy <= previous * (1 + 1e-10) + 1e-14;
    previous = energy;
  };
  Vector x;
  CHECK(cg_solve(sparse(A), b, x, opt).converged);
  CHECK(monotone);
}

TEST_CASE("dense LU")
{
  const Vector b = random_vector(4, 9);
  CHECK((dense_lu_solve(Eigen::MatrixXd::Identity(4, 4), b) - b).norm() == 0.0);

  Eigen::MatrixXd H(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      H(i, j) = 1.0 / (i + j + 1);
  const Vector x = dense_lu_solve(H, b);
  CHECK((H * x - b).norm() / b.norm() < 1e-10);

  Eigen::MatrixXd S = Eigen::MatrixXd::Ones(3, 3);
  CHECK_THROWS_AS(dense_lu_solve(S, Vector::Ones(3)), std::runtime_error);

  Eigen::MatrixXd P(2, 2);
  P << 0, 1, 1, 0; // needs pivoting
  const Vector y = dense_lu_solve(P, Vector(Eigen::Vector2d(3, 4)));
  CHECK(y[0] == 4.0);
  CHECK(y[1] == 3.0);
}

TEST_CASE("restriction")
{
  Eigen::MatrixXd A(3, 3);
  A << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const std::vector<int> keep{2, 0};
  const Eigen::MatrixXd R = restrict_matrix(sparse(A), keep);
  CHECK(R(0, 0) == 9);
  CHECK(R(0, 1) == 7);
  CHECK(R(1, 0) == 3);
  CHECK(R(1, 1) == 1);
}

TEST_CASE("condition number estimates")
{
  SparseMatrix I(10, 10);
  I.setIdentity();
  CHECK(std::abs(estimate_condition_number(I, std::vector<bool>(10, false)).kappa - 1.0) < 1e-6);

  Eigen::MatrixXd D = Eigen::Vector3d(1, 10, 100).asDiagonal();
  CHECK(std::abs(estimate_condition_number(sparse(D), std::vector<bool>(3, false)).kappa - 100.0)
        < 1e-6 * 100);

  const Eigen::MatrixXd A = random_spd(80, 10, 0.01);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  const double oracle = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
  const auto est = estimate_condition_number(sparse(A), std::vector<bool>(80, false));
  CHECK(std::abs(est.kappa - oracle) < 0.01 * oracle);

  // Excluded rows are ignored: embed A next to identity rows.
  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(83, 83);
  big.topLeftCorner(80, 80) = A;
  std::vector<bool> excluded(83, false);
  excluded[80] = excluded[81] = excluded[82] = true;
  CHECK(std::abs(estimate_condition_number(sparse(big), excluded).kappa - oracle) < 0.01 * oracle);

  // Invariance under a symmetric permutation.
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(80);
  perm.setIdentity();
  std::mt19937 rng(2);
  std::shuffle(perm.indices().data(), perm.indices().data() + 80, rng);
  const Eigen::MatrixXd PA = perm * A * perm.transpose();
  const auto permuted = estimate_condition_number(sparse(PA), std::vector<bool>(80, false));
  CHECK(std::abs(permuted.kappa - est.kappa) < 0.01 * est.kappa);
}
