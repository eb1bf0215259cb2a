#pragma once

#include "mmfem/multimesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

namespace mmfem
{

using BasisValues = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
using BasisGradients = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 6, 2>;

/// Nodal Lagrange element of degree 1 or 2 on the reference triangle.
/// P2 local ordering: three vertices, then the midpoints of the edges
/// opposite vertex 0, 1, 2.
class Element
{
public:
  explicit Element(int degree);

  int degree() const { return _degree; }
  int num_dofs() const { return _degree == 1 ? 3 : 6; }
  std::vector<Point2> reference_nodes() const;

  /// Values and reference gradients at a reference point.
  void eval(const Point2& ref, BasisValues& values, BasisGradients& gradients) const;

private:
  int _degree;
};

/// Affine map from the reference triangle onto a cell.
struct AffineMap
{
  Point2 origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse;

  explicit AffineMap(const Triangle& t);

  Point2 to_physical(const Point2& ref) const { return origin + jacobian * ref; }

  /// Reference coordinates, clamped onto the reference cell when the point
  /// lies outside by at most `clamp_tol` (constructed points carry rounding).
  Point2 to_reference(const Point2& x, double clamp_tol = 1e-12) const;
};

/// Per-part continuous DOF numbering over the full premesh.
struct DofMap
{
  std::vector<std::array<int, 6>> cell_dofs;
  std::vector<Point2> dof_coordinates;
  std::vector<bool> on_boundary;  // DOF lies on a boundary facet of the premesh
  int num_dofs = 0;
};

DofMap build_dofmap(const Mesh& mesh, const Element& element);

/// Direct sum of the part spaces; global DOF = offset(i) + local DOF.
class MultiMeshFunctionSpace
{
public:
  MultiMeshFunctionSpace(std::shared_ptr<const MultiMesh> mm, int degree);

  const MultiMesh& multimesh() const { return *_mm; }
  std::shared_ptr<const MultiMesh> multimesh_ptr() const { return _mm; }
  const Element& element() const { return _element; }
  int degree() const { return _element.degree(); }
  int num_parts() const { return static_cast<int>(_dofmaps.size()); }
  const DofMap& dofmap(int part) const { return _dofmaps[part]; }
  int offset(int part) const { return _offsets[part]; }
  int num_dofs() const { return _offsets.back(); }

  /// Global DOFs of a cell.
  std::array<int, 6> cell_dofs(int part, int cell) const;

  /// DOFs whose entire support is COVERED.
  const std::vector<bool>& inactive() const { return _inactive; }
  std::vector<int> inactive_dofs() const;

private:
  std::shared_ptr<const MultiMesh> _mm;
  Element _element;
  std::vector<DofMap> _dofmaps;
  std::vector<int> _offsets;
  std::vector<bool> _inactive;
};

std::shared_ptr<const MultiMeshFunctionSpace> build_space(std::shared_ptr<const MultiMesh> mm,
                                                          int degree);

using ScalarField = std::function<double(const Point2&)>;

/// u_h = (u_0, ..., u_N) as one coefficient vector over the direct sum.
class MultiMeshFunction
{
public:
  explicit MultiMeshFunction(std::shared_ptr<const MultiMeshFunctionSpace> space);
  MultiMeshFunction(std::shared_ptr<const MultiMeshFunctionSpace> space,
                    Eigen::VectorXd coefficients);

  const MultiMeshFunctionSpace& space() const { return *_space; }
  std::shared_ptr<const MultiMeshFunctionSpace> space_ptr() const { return _space; }
  Eigen::VectorXd& coefficients() { return _coefficients; }
  const Eigen::VectorXd& coefficients() const { return _coefficients; }

  /// Value of the part-local function u_part restricted to one cell.
  double eval_on_cell(int part, int cell, const Point2& x) const;
  Point2 gradient_on_cell(int part, int cell, const Point2& x) const;

private:
  std::shared_ptr<const MultiMeshFunctionSpace> _space;
  Eigen::VectorXd _coefficients;
};

/// Value from the topmost part containing x. Throws std::out_of_range for
/// points outside every part.
double evaluate(const MultiMeshFunction& f, const Point2& x);
Point2 evaluate_gradient(const MultiMeshFunction& f, const Point2& x);

/// Nodal interpolant on every part; inactive DOFs are set to zero.
MultiMeshFunction interpolate(const ScalarField& g,
                              std::shared_ptr<const MultiMeshFunctionSpace> space);

} // namespace mmfem
