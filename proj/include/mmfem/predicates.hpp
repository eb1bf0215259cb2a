#pragma once

#include "mmfem/point.hpp"

namespace mmfem
{

/// Exact sign of (b - a) x (c - a): +1 counter-clockwise, -1 clockwise,
/// 0 collinear. A floating-point filter with a static error bound decides
/// most inputs; the rest are evaluated exactly with expansion arithmetic.
int orient2d(const Point2& a, const Point2& b, const Point2& c);

/// Floating-point determinant (b - a) x (c - a), no robustness guarantees.
double orient2d_fast(const Point2& a, const Point2& b, const Point2& c);

/// Number of orient2d calls that needed the exact stage (diagnostics only).
long orient2d_exact_fallbacks();

} // namespace mmfem
