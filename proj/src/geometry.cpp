#include "mmfem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmfem
{
namespace
{

Triangle counter_clockwise(const Triangle& t)
{
  if (orient2d(t[0], t[1], t[2]) < 0)
    return {t[0], t[2], t[1]};
  return t;
}

void push_unique(std::vector<Point2>& points, const Point2& p, double tol)
{
  for (const auto& q : points)
    if ((q - p).squaredNorm() <= tol * tol)
      return;
  points.push_back(p);
}

} // namespace

Containment point_in_triangle(const Point2& p, const Triangle& t)
{
  const int orientation = orient2d(t[0], t[1], t[2]);
  if (orientation == 0)
    throw std::invalid_argument("point_in_triangle: degenerate triangle");

  bool on_edge = false;
  for (int e = 0; e < 3; ++e)
  {
    const int s = orient2d(t[e], t[(e + 1) % 3], p) * orientation;
    if (s < 0)
      return Containment::outside;
    on_edge = on_edge || s == 0;
  }
  return on_edge ? Containment::boundary : Containment::inside;
}

double ConvexPolygon::area() const
{
  double twice = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t k = 0; n >= 3 && k < n; ++k)
    twice += cross<double>(vertices[k], vertices[(k + 1) % n]);
  return 0.5 * twice;
}

ConvexPolygon graham_scan(std::span<const Point2> input)
{
  std::vector<Point2> points;
  for (const auto& p : input)
    push_unique(points, p, 0.0);
  if (points.size() <= 1)
    return {points};

  auto pivot_it = std::min_element(points.begin(), points.end(),
                                   [](const Point2& a, const Point2& b) {
                                     return a.y() < b.y() || (a.y() == b.y() && a.x() < b.x());
                                   });
  std::iter_swap(points.begin(), pivot_it);
  const Point2 pivot = points.front();

  // Every other point lies in the half-open upper half plane of the pivot,
  // so angular order reduces to orientation tests.
  std::sort(points.begin() + 1, points.end(), [&](const Point2& a, const Point2& b) {
    const int o = orient2d(pivot, a, b);
    if (o != 0)
      return o > 0;
    return (a - pivot).squaredNorm() < (b - pivot).squaredNorm();
  });

  std::vector<Point2> hull{pivot};
  for (std::size_t k = 1; k < points.size(); ++k)
  {
    while (hull.size() >= 2 && orient2d(hull[hull.size() - 2], hull.back(), points[k]) <= 0)
      hull.pop_back();
    hull.push_back(points[k]);
  }
  return {hull};
}

ConvexPolygon triangle_triangle_intersection(const Triangle& a, const Triangle& b)
{
  const Triangle t1 = counter_clockwise(a);
  const Triangle t2 = counter_clockwise(b);
  const double tol = 1e-13 * std::max(diameter(t1), diameter(t2));

  std::vector<Point2> candidates;
  for (const auto& v : t1)
    if (point_in_triangle(v, t2) != Containment::outside)
      push_unique(candidates, v, tol);
  for (const auto& v : t2)
    if (point_in_triangle(v, t1) != Containment::outside)
      push_unique(candidates, v, tol);

  for (int i = 0; i < 3; ++i)
  {
    const Point2& p0 = t1[i];
    const Point2& p1 = t1[(i + 1) % 3];
    for (int j = 0; j < 3; ++j)
    {
      const Point2& q0 = t2[j];
      const Point2& q1 = t2[(j + 1) % 3];
      // Touching configurations put an endpoint inside the other triangle,
      // which is already a candidate; only proper crossings remain.
      if (orient2d(p0, p1, q0) * orient2d(p0, p1, q1) >= 0)
        continue;
      if (orient2d(q0, q1, p0) * orient2d(q0, q1, p1) >= 0)
        continue;
      const Point2 dp = p1 - p0;
      const Point2 dq = q1 - q0;
      const double s = std::clamp(cross<double>(q0 - p0, dq) / cross<double>(dp, dq), 0.0, 1.0);
      push_unique(candidates, p0 + s * dp, tol);
    }
  }

  if (candidates.size() < 3)
    return {};
  ConvexPolygon hull = graham_scan(candidates);
  if (hull.size() < 3 || !(hull.area() > 0.0))
    return {};
  return hull;
}

std::vector<Triangle> triangulate_convex_polygon(const ConvexPolygon& p)
{
  std::vector<Triangle> triangles;
  for (std::size_t k = 2; k < p.size(); ++k)
    triangles.push_back({p.vertices[0], p.vertices[k - 1], p.vertices[k]});
  return triangles;
}

std::optional<Interval> clip_segment_against_triangle(const Segment& seg, const Triangle& t)
{
  const Triangle tri = counter_clockwise(t);
  const Point2& a = seg[0];
  const Point2& b = seg[1];

  double t0 = 0.0;
  double t1 = 1.0;
  for (int e = 0; e < 3; ++e)
  {
    const Point2& v0 = tri[e];
    const Point2& v1 = tri[(e + 1) % 3];
    const int sa = orient2d(v0, v1, a);
    const int sb = orient2d(v0, v1, b);
    if (sa >= 0 && sb >= 0)
      continue;
    if (sa < 0 && sb < 0)
      return std::nullopt;

    const double fa = orient2d_fast(v0, v1, a);
    const double fb = orient2d_fast(v0, v1, b);
    const double denom = fa - fb;
    double crossing = denom != 0.0 ? fa / denom : (sa < 0 ? 0.0 : 1.0);
    crossing = std::clamp(crossing, 0.0, 1.0);
    if (sa < 0)
      t0 = std::max(t0, crossing);
    else
      t1 = std::min(t1, crossing);
  }
  if (t0 > t1)
    return std::nullopt;
  return Interval{t0, t1};
}

std::vector<Interval> interval_union(std::vector<Interval> intervals)
{
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.t0 < b.t0; });
  std::vector<Interval> merged;
  for (const auto& iv : intervals)
  {
    if (!merged.empty() && iv.t0 <= merged.back().t1)
      merged.back().t1 = std::max(merged.back().t1, iv.t1);
    else
      merged.push_back(iv);
  }
  return merged;
}

std::vector<Interval> interval_subtract(std::vector<Interval> base, std::vector<Interval> cut)
{
  const auto cuts = interval_union(std::move(cut));
  std::vector<Interval> result;
  for (auto iv : interval_union(std::move(base)))
  {
    double start = iv.t0;
    for (const auto& c : cuts)
    {
      if (c.t1 <= start || c.t0 >= iv.t1)
        continue;
      if (c.t0 > start)
        result.push_back({start, c.t0});
      start = std::max(start, c.t1);
      if (start >= iv.t1)
        break;
    }
    if (start < iv.t1)
      result.push_back({start, iv.t1});
  }
  return result;
}

} // namespace mmfem
