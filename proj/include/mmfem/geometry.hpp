#pragma once

#include "mmfem/point.hpp"
#include "mmfem/predicates.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mmfem
{

enum class Containment
{
  outside,
  boundary,
  inside
};

/// Exact classification via three orientation tests.
/// Throws std::invalid_argument for a degenerate triangle.
Containment point_in_triangle(const Point2& p, const Triangle& t);

/// Counter-clockwise convex vertex list. Fewer than three vertices describe a
/// point or a segment, which carry no area.
struct ConvexPolygon
{
  std::vector<Point2> vertices;

  std::size_t size() const { return vertices.size(); }
  bool empty() const { return vertices.empty(); }
  double area() const;
};

/// Parameter range [t0, t1] along a segment a + t (b - a).
struct Interval
{
  double t0;
  double t1;

  double length() const { return t1 - t0; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Convex hull by Graham scan around the lowest point. Collinear and
/// duplicate points are dropped.
ConvexPolygon graham_scan(std::span<const Point2> points);

/// t1 ∩ t2 as a convex polygon. Candidate points are the vertices of each
/// triangle contained in the other plus proper edge-edge crossings; points
/// closer than 1e-13 times the local size are merged. Intersections without
/// area (shared vertex or edge) come back as an empty polygon.
ConvexPolygon triangle_triangle_intersection(const Triangle& t1, const Triangle& t2);

/// Fan triangulation from vertex 0; empty for fewer than three vertices.
std::vector<Triangle> triangulate_convex_polygon(const ConvexPolygon& p);

/// Parameter interval of `seg` inside the closed triangle, if any.
std::optional<Interval> clip_segment_against_triangle(const Segment& seg,
                                                      const Triangle& t);

/// Set difference of the unions of `base` and `cut`, as a sorted list of
/// disjoint intervals. Zero-length results are dropped.
std::vector<Interval> interval_subtract(std::vector<Interval> base,
                                        std::vector<Interval> cut);

/// Sorted disjoint union of possibly overlapping intervals.
std::vector<Interval> interval_union(std::vector<Interval> intervals);

} // namespace mmfem
