#include "mmfem/predicates.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <limits>

namespace mmfem
{
namespace
{

constexpr double epsilon = std::numeric_limits<double>::epsilon() / 2; // 2^-53
constexpr double splitter = 134217729.0;                                 // 2^27 + 1
constexpr double ccw_err_bound = (3.0 + 16.0 * epsilon) * epsilon;

std::atomic<long> exact_fallbacks{0};

// Error-free transformations (Dekker, Knuth). Each returns hi + lo == exact.
inline void two_sum(double a, double b, double& hi, double& lo)
{
  hi = a + b;
  const double bv = hi - a;
  const double av = hi - bv;
  lo = (a - av) + (b - bv);
}

inline void two_diff(double a, double b, double& hi, double& lo)
{
  hi = a - b;
  const double bv = a - hi;
  const double av = hi + bv;
  lo = (a - av) + (bv - b);
}

inline void split(double a, double& hi, double& lo)
{
  const double c = splitter * a;
  const double big = c - a;
  hi = c - big;
  lo = a - hi;
}

inline void two_product(double a, double b, double& hi, double& lo)
{
  hi = a * b;
  double ahi, alo, bhi, blo;
  split(a, ahi, alo);
  split(b, bhi, blo);
  const double err1 = hi - (ahi * bhi);
  const double err2 = err1 - (alo * bhi);
  const double err3 = err2 - (ahi * blo);
  lo = (alo * blo) - err3;
}

// Nonoverlapping expansion, components ordered by increasing magnitude.
struct Expansion
{
  std::array<double, 16> c{};
  int n = 0;
};

// h = e + f with zero elimination, by repeated grow-expansion.
Expansion expansion_sum(const Expansion& e, const Expansion& f)
{
  Expansion h = e;
  for (int i = 0; i < f.n; ++i)
  {
    Expansion g;
    double q = f.c[i];
    for (int j = 0; j < h.n; ++j)
    {
      double sum, err;
      two_sum(q, h.c[j], sum, err);
      q = sum;
      if (err != 0.0)
        g.c[g.n++] = err;
    }
    if (q != 0.0 || g.n == 0)
      g.c[g.n++] = q;
    h = g;
  }
  return h;
}

// e * b, exact.
Expansion scale_expansion(const Expansion& e, double b)
{
  Expansion h;
  if (e.n == 0)
    return h;
  double q, lo;
  two_product(e.c[0], b, q, lo);
  if (lo != 0.0)
    h.c[h.n++] = lo;
  for (int i = 1; i < e.n; ++i)
  {
    double p_hi, p_lo;
    two_product(e.c[i], b, p_hi, p_lo);
    double sum, err;
    two_sum(q, p_lo, sum, err);
    if (err != 0.0)
      h.c[h.n++] = err;
    double q2;
    two_sum(p_hi, sum, q2, err);
    if (err != 0.0)
      h.c[h.n++] = err;
    q = q2;
  }
  if (q != 0.0 || h.n == 0)
    h.c[h.n++] = q;
  return h;
}

int expansion_sign(const Expansion& e)
{
  for (int i = e.n - 1; i >= 0; --i)
  {
    if (e.c[i] > 0.0)
      return 1;
    if (e.c[i] < 0.0)
      return -1;
  }
  return 0;
}

int orient2d_exact(const Point2& a, const Point2& b, const Point2& c)
{
  // (bx - ax)(cy - ay) - (by - ay)(cx - ax) with every difference and
  // product carried exactly.
  Expansion bax, cay, bay, cax;
  two_diff(b.x(), a.x(), bax.c[1], bax.c[0]);
  two_diff(c.y(), a.y(), cay.c[1], cay.c[0]);
  two_diff(b.y(), a.y(), bay.c[1], bay.c[0]);
  two_diff(c.x(), a.x(), cax.c[1], cax.c[0]);
  bax.n = cay.n = bay.n = cax.n = 2;

  Expansion left = expansion_sum(scale_expansion(bax, cay.c[0]),
                                 scale_expansion(bax, cay.c[1]));
  Expansion right = expansion_sum(scale_expansion(bay, -cax.c[0]),
                                  scale_expansion(bay, -cax.c[1]));
  return expansion_sign(expansion_sum(left, right));
}

} // namespace

double orient2d_fast(const Point2& a, const Point2& b, const Point2& c)
{
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

int orient2d(const Point2& a, const Point2& b, const Point2& c)
{
  const double detleft = (b.x() - a.x()) * (c.y() - a.y());
  const double detright = (b.y() - a.y()) * (c.x() - a.x());
  const double det = detleft - detright;

  double detsum;
  if (detleft > 0.0)
  {
    if (detright <= 0.0)
      return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = detleft + detright;
  }
  else if (detleft < 0.0)
  {
    if (detright >= 0.0)
      return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = -detleft - detright;
  }
  else
  {
    return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  }

  const double errbound = ccw_err_bound * detsum;
  if (det >= errbound)
    return 1;
  if (-det >= errbound)
    return -1;

  exact_fallbacks.fetch_add(1, std::memory_order_relaxed);
  return orient2d_exact(a, b, c);
}

long orient2d_exact_fallbacks()
{
  return exact_fallbacks.load();
}

} // namespace mmfem
