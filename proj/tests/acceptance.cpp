// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Optional arguments select criteria by number.

#include "mmfem/assembly.hpp"
#include "mmfem/geometry.hpp"
#include "mmfem/harness.hpp"
#include "mmfem/predicates.hpp"
#include "support.hpp"

#include <gmpxx.h>

#include <Eigen/Dense>

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace mmfem;

namespace
{

struct Outcome
{
  bool pass;
  std::string detail;
};

double relative_spread(const std::vector<double>& v)
{
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

Outcome convergence_rates()
{
  std::ostringstream detail;
  bool pass = true;
  int runs = 0;
  for (int p : {1, 2})
    for (int N : {0, 1, 2, 4})
      for (unsigned seed : {0u, 1u, 2u})
      {
        StudyConfig cfg;
        cfg.N = N;
        cfg.p = p;
        cfg.seed = seed;
        const RateReport r = run_convergence(cfg);
        const bool ok = p == 1 ? (r.rate_l2 >= 1.8 && r.rate_l2 <= 2.6 && r.rate_h1 >= 0.85
                                  && r.rate_h1 <= 1.4)
                               : (r.rate_l2 >= 2.7 && r.rate_l2 <= 3.4 && r.rate_h1 >= 1.8
                                  && r.rate_h1 <= 2.3);
        ++runs;
        if (!ok)
        {
          pass = false;
          detail << " [N=" << N << " p=" << p << " seed=" << seed << " L2=" << r.rate_l2
                 << " H1=" << r.rate_h1 << "]";
        }
      }
  detail << " " << runs << " runs";
  return {pass, detail.str()};
}

Outcome thin_intersections()
{
  StudyConfig cfg;
  cfg.kind = StudyKind::thin;
  cfg.N = 3;
  cfg.coarse = 32;
  cfg.ks = {0, 8, 16, 32, 52};
  std::vector<ThinResult> results;
  try
  {
    results = run_thin_intersection(cfg);
  }
  catch (const std::exception& e)
  {
    return {false, e.what()};
  }
  std::vector<double> l2, h1, kappa;
  for (const auto& r : results)
  {
    l2.push_back(r.err_l2);
    h1.push_back(r.err_h1);
    kappa.push_back(r.kappa);
  }
  const double sl2 = relative_spread(l2), sh1 = relative_spread(h1), sk = relative_spread(kappa);
  std::ostringstream detail;
  detail << "L2 spread " << sl2 << ", H1 spread " << sh1 << ", kappa spread " << sk << " (kappa";
  for (double k : kappa)
    detail << " " << k;
  detail << ")";
  return {sl2 < 0.1 && sh1 < 0.1 && sk < 0.25, detail.str()};
}

Outcome condition_scaling()
{
  StudyConfig cfg;
  cfg.kind = StudyKind::condition_scaling;
  cfg.N = 3;
  const ConditionReport r = run_condition_scaling(cfg);
  std::ostringstream detail;
  detail << "slope " << r.slope;
  return {r.slope >= -2.2 && r.slope <= -1.5, detail.str()};
}

int rational_orient(const Point2& a, const Point2& b, const Point2& c)
{
  const mpq_class ax(a.x()), ay(a.y()), bx(b.x()), by(b.y()), cx(c.x()), cy(c.y());
  return sgn((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

Outcome geometry_oracles()
{
  constexpr int pairs = 10000;
  constexpr int samples = 1000000;
  std::mt19937 rng(2024);

  // One fixed set of uniform samples on the reference triangle, mapped
  // affinely into the first triangle of every pair.
  std::vector<double> su(samples), sv(samples);
  {
    std::mt19937_64 bits(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < samples; ++s)
    {
      const double u = unit(bits), v = unit(bits);
      su[s] = u + v > 1.0 ? 1.0 - u : u;
      sv[s] = u + v > 1.0 ? 1.0 - v : v;
    }
  }

  int passed = 0;
  for (int k = 0; k < pairs; ++k)
  {
    const Triangle t1 = test::random_triangle(rng);
    const Triangle t2 = test::random_triangle(rng);
    const double area = triangle_triangle_intersection(t1, t2).area();

    // Edge functions of t2 are affine in the reference coordinates of t1.
    const Point2 e1 = t1[1] - t1[0], e2 = t1[2] - t1[0];
    const double orientation = signed_area(t2) > 0 ? 1.0 : -1.0;
    double c0[3], cu[3], cv[3];
    for (int i = 0; i < 3; ++i)
    {
      const Point2& p = t2[i];
      const Point2& q = t2[(i + 1) % 3];
      const Point2 n = orientation * Point2(p.y() - q.y(), q.x() - p.x());
      c0[i] = n.dot(t1[0] - p);
      cu[i] = n.dot(e1);
      cv[i] = n.dot(e2);
    }
    long hits = 0;
    for (int s = 0; s < samples; ++s)
    {
      const double u = su[s], v = sv[s];
      hits += (c0[0] + u * cu[0] + v * cv[0] >= 0.0) & (c0[1] + u * cu[1] + v * cv[1] >= 0.0)
              & (c0[2] + u * cu[2] + v * cv[2] >= 0.0);
    }
    const double a1 = std::abs(signed_area(t1));
    const double q = double(hits) / samples;
    const double estimate = a1 * q;
    const double stderr_ = a1 * std::sqrt(std::max(q * (1 - q), 1.0 / samples) / samples);
    if (std::abs(estimate - area) <= 3.0 * stderr_)
      ++passed;
  }
  const double rate = double(passed) / pairs;

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ulp(-4, 4);
  int mismatches = 0;
  for (int k = 0; k < 100000; ++k)
  {
    const Point2 a(u(rng), u(rng)), b(u(rng), u(rng));
    Point2 c = a + (2.0 * u(rng)) * (b - a);
    c.x() = std::nextafter(c.x(), c.x() + ulp(rng));
    c.y() = std::nextafter(c.y(), c.y() + ulp(rng));
    if (orient2d(a, b, c) != rational_orient(a, b, c))
      ++mismatches;
  }
  std::ostringstream detail;
  detail << "intersection pass rate " << 100.0 * rate << "%, orient2d mismatches " << mismatches;
  return {rate >= 0.99 && mismatches == 0, detail.str()};
}

Outcome partition_of_unity()
{
  double worst = 0.0;
  for (unsigned seed = 0; seed < 20; ++seed)
  {
    const int parts = 2 + int(seed % 4);
    std::vector<Mesh> meshes{unit_square_mesh(8, 8)};
    for (const auto& s : random_squares(parts - 1, seed))
      meshes.push_back(square_mesh(s, 8 + int(seed)));
    const MultiMesh mm(std::move(meshes), 2);
    double mass = 0.0;
    for (int i = 0; i < mm.num_parts(); ++i)
      for (int c = 0; c < int(mm.part(i).num_cells()); ++c)
        mass += mm.visible_rule(i, c).mass();
    worst = std::max(worst, std::abs(mass - 1.0));
  }
  std::ostringstream detail;
  detail << "max relative deviation " << worst;
  return {worst <= 1e-10, detail.str()};
}

Outcome patch_test()
{
  std::vector<Mesh> parts{unit_square_mesh(8, 8), square_mesh({{0.45, 0.55}, 0.37, 0.6}, 10)};
  auto space = build_space(std::make_shared<const MultiMesh>(std::move(parts), 2), 1);
  auto u = [](const Point2& x) { return 0.5 + 2.0 * x.x() - 1.5 * x.y(); };
  PoissonProblem problem;
  problem.f = [](const Point2&) { return 0.0; };
  problem.beta0 = 6.0;
  problem.beta1 = 10.0;
  const auto uh = solve(assemble_poisson(*space, problem, u), space);
  std::mt19937 rng(6);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k)
  {
    const Point2 x = test::uniform_point(rng);
    worst = std::max(worst, std::abs(evaluate(uh, x) - u(x)));
  }
  std::ostringstream detail;
  detail << "max pointwise error " << worst;
  return {worst <= 1e-9, detail.str()};
}

Outcome single_mesh_reduction()
{
  auto space = build_space(
      std::make_shared<const MultiMesh>(std::vector<Mesh>{unit_square_mesh(1, 1)}, 2), 1);
  PoissonProblem problem;
  problem.f = [](const Point2&) { return 0.0; };
  SystemBuilder sys(space->num_dofs());
  assemble_volume(*space, problem, sys);
  assemble_interface(*space, problem, sys);
  assemble_overlap_stab(*space, problem, sys);
  Eigen::Matrix4d hand;
  hand << 1, -0.5, -0.5, 0, -0.5, 1, 0, -0.5, -0.5, 0, 1, -0.5, 0, -0.5, -0.5, 1;
  const double matrix_error = (Eigen::MatrixXd(sys.matrix()) - hand).cwiseAbs().maxCoeff();

  auto fine = build_space(
      std::make_shared<const MultiMesh>(std::vector<Mesh>{unit_square_mesh(6, 6)}, 2), 1);
  problem.f = exact_rhs;
  const auto system = assemble_poisson(*fine, problem);
  const auto uh = solve(system, fine);
  const Vector lu = dense_lu_solve(Eigen::MatrixXd(system.A), system.b);
  const double solve_error = (uh.coefficients() - lu).cwiseAbs().maxCoeff();
  std::ostringstream detail;
  detail << "matrix error " << matrix_error << ", CG vs LU " << solve_error;
  return {matrix_error <= 1e-13 && solve_error <= 1e-9, detail.str()};
}

Outcome electrostatics()
{
  StudyConfig cfg;
  cfg.kind = StudyKind::electrostatics;
  cfg.steps = 50;
  cfg.dt = 0.2;
  ElectroReport report;
  try
  {
    report = run_electrostatics(cfg);
  }
  catch (const std::exception& e)
  {
    return {false, e.what()};
  }

  std::vector<Point2> square;
  for (int k = 0; k < 4; ++k)
  {
    const double t = std::numbers::pi / 4 + std::numbers::pi / 2 * k;
    square.emplace_back(0.3 * std::cos(t), 0.3 * std::sin(t));
  }
  const std::vector<RigidBody> single{make_body(square, 4)};
  const double force = solve_electrostatics(ElectroSetup{}, single).loads[0].force.norm();
  const double bound = 1e-3 * single[0].charge_density * single[0].mass;

  ElectroSetup coarse;
  coarse.background_cells = 24;
  const double jump_coarse = solve_electrostatics(coarse, default_bodies(2)).max_interface_jump;
  const double jump_fine = solve_electrostatics(ElectroSetup{}, default_bodies(4)).max_interface_jump;

  std::ostringstream detail;
  detail << report.trajectory.size() / 3 << " steps, inside box " << report.all_inside_box
         << ", single-body |F| " << force << " (bound " << bound << "), interface jump "
         << jump_coarse << " -> " << jump_fine;
  return {report.all_inside_box && force < bound && jump_fine < jump_coarse, detail.str()};
}

} // namespace

int main(int argc, char** argv)
{
  std::vector<bool> selected(9, argc == 1);
  for (int a = 1; a < argc; ++a)
  {
    const int k = std::atoi(argv[a]);
    if (k >= 1 && k <= 8)
      selected[k] = true;
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"convergence rates", convergence_rates},
      {"thin intersections", thin_intersections},
      {"condition number scaling", condition_scaling},
      {"geometry oracles", geometry_oracles},
      {"quadrature partition of unity", partition_of_unity},
      {"patch test", patch_test},
      {"single-mesh reduction", single_mesh_reduction},
      {"electrostatics", electrostatics}};

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k)
  {
    if (!selected[k + 1])
      continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try
    {
      r = criteria[k].second();
    }
    catch (const std::exception& e)
    {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), r.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !r.pass;
  }
  return failures == 0 ? 0 : 1;
}
