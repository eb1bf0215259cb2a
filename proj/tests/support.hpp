#pragma once

#include "mmfem/geometry.hpp"
#include "mmfem/point.hpp"

#include <cmath>
#include <random>

namespace test
{

using mmfem::Point2;
using mmfem::Triangle;

inline Point2 uniform_point(std::mt19937& rng, double lo = 0.0, double hi = 1.0)
{
  std::uniform_real_distribution<double> u(lo, hi);
  const double x = u(rng);
  return {x, u(rng)};
}

/// Counter-clockwise triangle with area at least `min_area`.
inline Triangle random_triangle(std::mt19937& rng, double lo = 0.0, double hi = 1.0,
                                double min_area = 1e-3)
{
  for (;;)
  {
    Triangle t{uniform_point(rng, lo, hi), uniform_point(rng, lo, hi), uniform_point(rng, lo, hi)};
    const double a = mmfem::signed_area(t);
    if (std::abs(a) < min_area)
      continue;
    if (a < 0)
      std::swap(t[1], t[2]);
    return t;
  }
}

inline bool in_closed(const Point2& p, const Triangle& t)
{
  return mmfem::point_in_triangle(p, t) != mmfem::Containment::outside;
}

/// Monte-Carlo estimate over the box [lo, hi]^2 with its standard error.
struct McEstimate
{
  double value;
  double stderr_;
};

template <typename Indicator>
McEstimate monte_carlo_measure(std::mt19937& rng, Point2 lo, Point2 hi, int samples,
                               Indicator&& inside)
{
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  long hits = 0;
  for (int s = 0; s < samples; ++s)
  {
    const Point2 x(ux(rng), uy(rng));
    if (inside(x))
      ++hits;
  }
  const double box = (hi.x() - lo.x()) * (hi.y() - lo.y());
  const double p = double(hits) / samples;
  return {box * p, box * std::sqrt(std::max(p * (1 - p), 1.0 / samples) / samples)};
}

} // namespace test
