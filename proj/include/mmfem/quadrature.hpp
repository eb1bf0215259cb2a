#pragma once

#include "mmfem/point.hpp"

#include <span>
#include <vector>

namespace mmfem
{

/// Points and signed weights. Rules produced by inclusion-exclusion carry
/// negative weights; the weight sum is the signed measure of the set.
struct QuadratureRule
{
  std::vector<Point2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double mass() const;

  void append(const QuadratureRule& other, double scale = 1.0);

  template <typename F>
  double integrate(F&& f) const
  {
    double sum = 0.0;
    for (std::size_t q = 0; q < points.size(); ++q)
      sum += weights[q] * f(points[q]);
    return sum;
  }
};

/// Rule on a straight interface segment together with the unit normal that
/// points out of the owning predomain.
struct InterfaceRule
{
  QuadratureRule rule;
  Point2 normal;
  Segment segment;
};

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussLegendre
{
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int num_points);

/// Rule on the reference triangle (0,0), (1,0), (0,1), exact for total
/// degree <= order. Supported orders are 1..10.
QuadratureRule reference_triangle_rule(int order);

/// Affine push-forward; weights scale by 2 |area(t)|.
QuadratureRule map_rule_to_triangle(const QuadratureRule& reference, const Triangle& t);

/// Gauss-Legendre rule on segment [a, b] exact for degree <= order.
QuadratureRule gauss_segment_rule(int order, const Point2& a, const Point2& b);

struct SignedSimplex
{
  Triangle triangle;
  int sign;
};

/// Signed simplex decomposition of (∪ start) \ ∪ cutters, built one cutter
/// at a time: each cutter C adds -s (T ∩ C) for every (s, T) already in the
/// list. Pieces with area below `min_area` are dropped.
std::vector<SignedSimplex> inclusion_exclusion(const std::vector<Triangle>& start,
                                               std::span<const Triangle> cutters,
                                               double min_area);

QuadratureRule rule_from_simplices(std::span<const SignedSimplex> simplices, int order);

/// Relative pruning threshold for inclusion-exclusion pieces.
inline constexpr double prune_area_fraction = 1e-14;

/// Signed rule on K \ ∪ cutters.
QuadratureRule inclusion_exclusion_cut_rule(const Triangle& K, std::span<const Triangle> cutters,
                                            int order);

/// Signed rule on (K ∩ C) \ ∪ higher_cutters.
QuadratureRule overlap_rule(const Triangle& K, const Triangle& C,
                            std::span<const Triangle> higher_cutters, int order);

} // namespace mmfem
