#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>

namespace mmfem
{

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

using Point2 = Vector2<double>;

/// Three corners, counter-clockwise when the triangle comes from a Mesh.
template <typename Scalar>
using TriangleT = std::array<Vector2<Scalar>, 3>;
using Triangle = TriangleT<double>;

template <typename Scalar>
using SegmentT = std::array<Vector2<Scalar>, 2>;
using Segment = SegmentT<double>;

template <typename Scalar>
inline Scalar cross(const Vector2<Scalar>& u, const Vector2<Scalar>& v)
{
  return u.x() * v.y() - u.y() * v.x();
}

template <typename Scalar>
inline Scalar signed_area(const Vector2<Scalar>& a, const Vector2<Scalar>& b,
                          const Vector2<Scalar>& c)
{
  return Scalar(0.5) * cross<Scalar>(b - a, c - a);
}

template <typename Scalar>
inline Scalar signed_area(const TriangleT<Scalar>& t)
{
  return signed_area<Scalar>(t[0], t[1], t[2]);
}

template <typename Scalar>
inline Scalar area(const TriangleT<Scalar>& t)
{
  using std::abs;
  return abs(signed_area<Scalar>(t));
}

template <typename Scalar>
inline Scalar diameter(const TriangleT<Scalar>& t)
{
  using std::max;
  return max({(t[1] - t[0]).norm(), (t[2] - t[1]).norm(), (t[0] - t[2]).norm()});
}

template <typename Scalar>
inline Vector2<Scalar> centroid(const TriangleT<Scalar>& t)
{
  return (t[0] + t[1] + t[2]) / Scalar(3);
}

} // namespace mmfem
