#include "mmfem/fespace.hpp"
#include "mmfem/harness.hpp"
#include "mmfem/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace mmfem;

namespace
{

std::shared_ptr<const MultiMesh> two_parts()
{
  return std::make_shared<const MultiMesh>(
      std::vector<Mesh>{unit_square_mesh(6, 6), square_mesh({{0.5, 0.45}, 0.35, 0.5}, 10)}, 4);
}

std::shared_ptr<const MultiMesh> three_parts()
{
  return std::make_shared<const MultiMesh>(
      std::vector<Mesh>{unit_square_mesh(6, 6), square_mesh({{0.4, 0.45}, 0.35, 0.5}, 10),
                        square_mesh({{0.6, 0.55}, 0.3, 1.3}, 8)},
      4);
}

} // namespace

TEST_CASE("element basis")
{
  for (int p : {1, 2})
  {
    const Element e(p);
    const auto nodes = e.reference_nodes();
    REQUIRE(int(nodes.size()) == e.num_dofs());
    BasisValues v;
    BasisGradients g;
    for (int k = 0; k < e.num_dofs(); ++k)
    {
      e.eval(nodes[k], v, g);
      for (int j = 0; j < e.num_dofs(); ++j)
        CHECK(std::abs(v[j] - (j == k ? 1.0 : 0.0)) < 1e-15);
    }
    std::mt19937 rng(p);
    for (int k = 0; k < 1000; ++k)
    {
      Point2 x = test::uniform_point(rng);
      if (x.sum() > 1)
        x = Point2(1, 1) - x;
      e.eval(x, v, g);
      CHECK(std::abs(v.sum() - 1.0) < 1e-14);
      CHECK(g.colwise().sum().norm() < 1e-13);
      if (p == 1)
      {
        BasisValues v0;
        BasisGradients g0;
        e.eval(Point2(0.2, 0.2), v0, g0);
        CHECK((g - g0).norm() == 0.0);
      }
      // Central finite differences.
      const double step = 1e-6;
      BasisValues vp, vm;
      BasisGradients tmp;
      for (int d = 0; d < 2; ++d)
      {
        Point2 xp = x, xm = x;
        xp[d] += step;
        xm[d] -= step;
        e.eval(xp, vp, tmp);
        e.eval(xm, vm, tmp);
        const BasisValues fd = (vp - vm) / (2 * step);
        CHECK((fd - g.col(d)).cwiseAbs().maxCoeff() < 1e-7);
      }
    }
  }
  CHECK_THROWS_AS(Element(3), std::invalid_argument);
  CHECK_THROWS_AS(Element(0), std::invalid_argument);
}

TEST_CASE("dof counts")
{
  for (int n : {1, 3, 5})
  {
    auto mm = std::make_shared<const MultiMesh>(std::vector<Mesh>{unit_square_mesh(n, n)}, 2);
    CHECK(build_space(mm, 1)->num_dofs() == (n + 1) * (n + 1));
    CHECK(build_space(mm, 2)->num_dofs() == (2 * n + 1) * (2 * n + 1));
  }
  auto mm = two_parts();
  for (int p : {1, 2})
  {
    const auto space = build_space(mm, p);
    CHECK(space->num_dofs() == space->dofmap(0).num_dofs + space->dofmap(1).num_dofs);
    CHECK(space->offset(0) == 0);
    CHECK(space->offset(1) == space->dofmap(0).num_dofs);
  }
}

TEST_CASE("inactive dofs match a support scan")
{
  auto mm = three_parts();
  for (int p : {1, 2})
  {
    const auto space = build_space(mm, p);
    std::vector<bool> supported(space->num_dofs(), false);
    for (int part = 0; part < mm->num_parts(); ++part)
      for (int c = 0; c < int(mm->part(part).num_cells()); ++c)
        if (mm->is_active(part, c))
        {
          const auto dofs = space->cell_dofs(part, c);
          for (int k = 0; k < space->element().num_dofs(); ++k)
            supported[dofs[k]] = true;
        }
    int inactive = 0;
    for (int d = 0; d < space->num_dofs(); ++d)
    {
      CHECK(space->inactive()[d] == !supported[d]);
      inactive += !supported[d];
    }
    CHECK(inactive > 0);
    CHECK(int(space->inactive_dofs().size()) == inactive);
  }
}

TEST_CASE("interpolation and evaluation")
{
  auto mm = three_parts();
  std::mt19937 rng(3);
  for (int p : {1, 2})
  {
    const auto space = build_space(mm, p);
    const auto zero = interpolate([](const Point2&) { return 0.0; }, space);
    CHECK(zero.coefficients().isZero());

    const auto c = interpolate([](const Point2&) { return 2.5; }, space);
    const auto lin = interpolate([](const Point2& x) { return x.x() + 2 * x.y(); }, space);
    const auto quad = interpolate([](const Point2& x) { return x.x() * x.y() - x.y() * x.y(); }, space);
    for (int k = 0; k < 1000; ++k)
    {
      const Point2 x = test::uniform_point(rng);
      CHECK(std::abs(evaluate(c, x) - 2.5) < 1e-13);
      CHECK(std::abs(evaluate(lin, x) - (x.x() + 2 * x.y())) < 1e-12);
      CHECK((evaluate_gradient(lin, x) - Point2(1, 2)).norm() < 1e-11);
      if (p == 2)
        CHECK(std::abs(evaluate(quad, x) - (x.x() * x.y() - x.y() * x.y())) < 1e-12);
    }
    CHECK_THROWS_AS(evaluate(c, Point2(1.5, 0.5)), std::out_of_range);
  }
}

TEST_CASE("zeroed part evaluates to zero on its visible domain")
{
  auto mm = two_parts();
  const auto space = build_space(mm, 1);
  auto f = interpolate([](const Point2&) { return 1.0; }, space);
  for (int d = space->offset(1); d < space->num_dofs(); ++d)
    f.coefficients()[d] = 0.0;
  std::mt19937 rng(5);
  int hits = 0;
  for (int k = 0; k < 2000; ++k)
  {
    const Point2 x = test::uniform_point(rng);
    const auto where = mm->locate_point(x);
    if (where && where->part == 1)
    {
      CHECK(evaluate(f, x) == 0.0);
      ++hits;
    }
    else
      CHECK(std::abs(evaluate(f, x) - 1.0) < 1e-13);
  }
  CHECK(hits > 0);
}

TEST_CASE("jumps of a global polynomial vanish")
{
  auto mm = three_parts();
  for (int p : {1, 2})
  {
    const auto space = build_space(mm, p);
    const auto g = interpolate(
        [p](const Point2& x) { return 1 + x.x() - 3 * x.y() + (p == 2 ? x.x() * x.y() : 0.0); },
        space);
    for (const auto& e : mm->interfaces())
      for (const auto& x : e.rule.rule.points)
        CHECK(std::abs(g.eval_on_cell(e.i, e.cell_i, x) - g.eval_on_cell(e.j, e.cell_j, x))
              < 1e-11);
    for (const auto& o : mm->overlaps())
      for (const auto& x : o.rule.points)
        CHECK((g.gradient_on_cell(o.i, o.cell_i, x) - g.gradient_on_cell(o.j, o.cell_j, x)).norm()
              < 1e-10);
  }
}

TEST_CASE("interpolation error rate")
{
  for (int p : {1, 2})
  {
    std::vector<double> h, err;
    for (int n : {4, 8, 16, 32})
    {
      auto mm = std::make_shared<const MultiMesh>(std::vector<Mesh>{unit_square_mesh(n, n)}, 2 * p);
      const auto u = interpolate(exact_solution, build_space(mm, p));
      h.push_back(1.0 / n);
      err.push_back(error_norms(u, exact_solution, exact_gradient, 2 * p + 2).l2);
    }
    CHECK(std::abs(fit_loglog_slope(h, err) - (p + 1)) < 0.2);
  }
}

TEST_CASE("function snapshot")
{
  auto mm = two_parts();
  const auto space = build_space(mm, 2);
  const auto f = interpolate([](const Point2& x) { return x.x(); }, space);
  std::ostringstream out;
  io::write_function_snapshot(out, f);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "part,vertex,x,y,value");
  int rows = 0;
  while (std::getline(in, line))
  {
    double x, value;
    int part, vertex;
    char comma;
    double y;
    std::istringstream row(line);
    row >> part >> comma >> vertex >> comma >> x >> comma >> y >> comma >> value;
    if (space->inactive()[space->offset(part) + vertex])
      CHECK(value == 0.0);
    else
      CHECK(std::abs(value - x) < 1e-12);
    ++rows;
  }
  CHECK(rows == int(mm->part(0).num_vertices() + mm->part(1).num_vertices()));
}
