#include "mmfem/quadrature.hpp"
#include "mmfem/aabb_tree.hpp"
#include "mmfem/geometry.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace mmfem
{
namespace
{

// Symmetric rule from barycentric orbits; weights normalized to sum 1.
struct Orbit
{
  double a; // barycentric (a, a, 1 - 2a); a = 1/3 is the centroid
  double weight;
};

QuadratureRule symmetric_rule(std::initializer_list<Orbit> orbits)
{
  QuadratureRule rule;
  for (const auto& o : orbits)
  {
    const double b = 1.0 - 2.0 * o.a;
    if (std::abs(o.a - 1.0 / 3.0) < 1e-15)
    {
      rule.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      rule.weights.push_back(0.5 * o.weight);
      continue;
    }
    for (const Point2& p : {Point2(o.a, o.a), Point2(b, o.a), Point2(o.a, b)})
    {
      rule.points.push_back(p);
      rule.weights.push_back(0.5 * o.weight);
    }
  }
  return rule;
}

// Collapsed (Duffy) tensor Gauss rule: x = u (1 - v), y = v.
QuadratureRule collapsed_gauss_rule(int order)
{
  const int n = (order + 3) / 2;
  const auto gl = gauss_legendre(n);
  QuadratureRule rule;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
    {
      const double u = gl.nodes[i];
      const double v = gl.nodes[j];
      rule.points.emplace_back(u * (1.0 - v), v);
      rule.weights.push_back(gl.weights[i] * gl.weights[j] * (1.0 - v));
    }
  return rule;
}

} // namespace

double QuadratureRule::mass() const
{
  double sum = 0.0;
  for (double w : weights)
    sum += w;
  return sum;
}

void QuadratureRule::append(const QuadratureRule& other, double scale)
{
  points.insert(points.end(), other.points.begin(), other.points.end());
  for (double w : other.weights)
    weights.push_back(scale * w);
}

GaussLegendre gauss_legendre(int num_points)
{
  if (num_points < 1)
    throw std::invalid_argument("gauss_legendre: need at least one point");

  // P_n and P_n' at x by the three-term recurrence.
  const int n = num_points;
  auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k)
    {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };

  GaussLegendre rule;
  for (int i = 0; i < n; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter)
    {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double dp = legendre(x).second;
    rule.nodes.push_back(0.5 * (1.0 - x));
    rule.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  return rule;
}

namespace
{

QuadratureRule make_reference_rule(int order)
{
  switch (order)
  {
  case 1:
    return symmetric_rule({{1.0 / 3.0, 1.0}});
  case 2:
    return symmetric_rule({{1.0 / 6.0, 1.0 / 3.0}});
  case 3:
  case 4:
    return symmetric_rule({{0.445948490915965, 0.223381589678011},
                           {0.091576213509771, 0.109951743655322}});
  case 5:
  {
    const double r = std::sqrt(15.0);
    return symmetric_rule({{1.0 / 3.0, 9.0 / 40.0},
                           {(6.0 - r) / 21.0, (155.0 - r) / 1200.0},
                           {(6.0 + r) / 21.0, (155.0 + r) / 1200.0}});
  }
  default:
    return collapsed_gauss_rule(order);
  }
}

} // namespace

QuadratureRule reference_triangle_rule(int order)
{
  if (order < 1 || order > 10)
    throw std::invalid_argument("reference_triangle_rule: unsupported order "
                                + std::to_string(order));

  static const std::array<QuadratureRule, 10> table = [] {
    std::array<QuadratureRule, 10> rules;
    for (int k = 1; k <= 10; ++k)
      rules[k - 1] = make_reference_rule(k);
    return rules;
  }();
  return table[order - 1];
}

QuadratureRule map_rule_to_triangle(const QuadratureRule& reference, const Triangle& t)
{
  Eigen::Matrix2d jacobian;
  jacobian.col(0) = t[1] - t[0];
  jacobian.col(1) = t[2] - t[0];
  const double det = std::abs(jacobian.determinant());
  if (!(det > 0.0))
    throw std::invalid_argument("map_rule_to_triangle: degenerate triangle");

  QuadratureRule rule;
  rule.points.reserve(reference.size());
  rule.weights.reserve(reference.size());
  for (std::size_t q = 0; q < reference.size(); ++q)
  {
    rule.points.push_back(t[0] + jacobian * reference.points[q]);
    rule.weights.push_back(det * reference.weights[q]);
  }
  return rule;
}

QuadratureRule gauss_segment_rule(int order, const Point2& a, const Point2& b)
{
  const double length = (b - a).norm();
  if (!(length > 0.0))
    throw std::invalid_argument("gauss_segment_rule: degenerate segment");

  const auto gl = gauss_legendre(std::max(1, (order + 2) / 2));
  QuadratureRule rule;
  for (std::size_t q = 0; q < gl.nodes.size(); ++q)
  {
    rule.points.push_back(a + gl.nodes[q] * (b - a));
    rule.weights.push_back(length * gl.weights[q]);
  }
  return rule;
}

std::vector<SignedSimplex> inclusion_exclusion(const std::vector<Triangle>& start,
                                               std::span<const Triangle> cutters,
                                               double min_area)
{
  std::vector<SignedSimplex> pieces;
  for (const auto& t : start)
    if (area(t) > min_area)
      pieces.push_back({t, 1});

  std::vector<SignedSimplex> added;
  for (const auto& cutter : cutters)
  {
    const AABB cutter_box = AABB::of(cutter);
    added.clear();
    for (const auto& piece : pieces)
    {
      if (!AABB::of(piece.triangle).overlaps(cutter_box))
        continue;
      const auto polygon = triangle_triangle_intersection(piece.triangle, cutter);
      if (polygon.area() <= min_area)
        continue;
      for (const auto& t : triangulate_convex_polygon(polygon))
        if (area(t) > min_area)
          added.push_back({t, -piece.sign});
    }
    pieces.insert(pieces.end(), added.begin(), added.end());
  }
  return pieces;
}

QuadratureRule rule_from_simplices(std::span<const SignedSimplex> simplices, int order)
{
  const auto reference = reference_triangle_rule(order);
  QuadratureRule rule;
  for (const auto& s : simplices)
    rule.append(map_rule_to_triangle(reference, s.triangle), s.sign);
  return rule;
}

QuadratureRule inclusion_exclusion_cut_rule(const Triangle& K, std::span<const Triangle> cutters,
                                            int order)
{
  const double min_area = prune_area_fraction * area(K);
  return rule_from_simplices(inclusion_exclusion({K}, cutters, min_area), order);
}

QuadratureRule overlap_rule(const Triangle& K, const Triangle& C,
                            std::span<const Triangle> higher_cutters, int order)
{
  const double min_area = prune_area_fraction * area(K);
  const auto start = triangulate_convex_polygon(triangle_triangle_intersection(K, C));
  return rule_from_simplices(inclusion_exclusion(start, higher_cutters, min_area), order);
}

} // namespace mmfem
