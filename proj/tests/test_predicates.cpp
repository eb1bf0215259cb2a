#include "mmfem/predicates.hpp"

#include <doctest.h>
#include <gmpxx.h>

#include <cmath>
#include <random>

using namespace mmfem;

namespace
{

int rational_orient(const Point2& a, const Point2& b, const Point2& c)
{
  const mpq_class ax(a.x()), ay(a.y()), bx(b.x()), by(b.y()), cx(c.x()), cy(c.y());
  const mpq_class det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return sgn(det);
}

} // namespace

TEST_CASE("orient2d basic cases")
{
  CHECK(orient2d({0, 0}, {1, 0}, {2, 0}) == 0);
  CHECK(orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
  CHECK(orient2d({0, 0}, {0, 1}, {1, 0}) == -1);
  CHECK(orient2d({0, 0}, {1e-17, 1}, {2e-17, 2 + 1e-15}) == rational_orient({0, 0}, {1e-17, 1}, {2e-17, 2 + 1e-15}));
}

TEST_CASE("orient2d matches rational arithmetic on near-degenerate triples")
{
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ulp(-4, 4);
  int mismatches = 0;
  for (int k = 0; k < 20000; ++k)
  {
    const Point2 a(u(rng), u(rng));
    const Point2 b(u(rng), u(rng));
    const double t = u(rng) * 2.0;
    Point2 c = a + t * (b - a);
    // Nudge by a few ulps so that the sign is decided by rounding-level terms.
    c.x() = std::nextafter(c.x(), c.x() + ulp(rng));
    c.y() = std::nextafter(c.y(), c.y() + ulp(rng));
    if (orient2d(a, b, c) != rational_orient(a, b, c))
      ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("orient2d is antisymmetric")
{
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10000; ++k)
  {
    const Point2 a(u(rng), u(rng)), b(u(rng), u(rng));
    const Point2 c = 0.5 * (a + b) + Point2(1e-17 * u(rng), 0.0);
    const int s = orient2d(a, b, c);
    CHECK(orient2d(b, a, c) == -s);
    CHECK(orient2d(a, c, b) == -s);
    CHECK(orient2d(c, b, a) == -s);
    CHECK(orient2d(b, c, a) == s);
  }
}

TEST_CASE("orient2d exact path is exercised")
{
  const long before = orient2d_exact_fallbacks();
  CHECK(orient2d({0.1, 0.1}, {0.2, 0.2}, {0.30000000000000004, 0.3}) == rational_orient({0.1, 0.1}, {0.2, 0.2}, {0.30000000000000004, 0.3}));
  CHECK(orient2d_exact_fallbacks() > before);
  CHECK(orient2d_fast({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(1.0));
}
