#include "mmfem/fespace.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mmfem
{

Element::Element(int degree) : _degree(degree)
{
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("Element: unsupported degree " + std::to_string(degree));
}

std::vector<Point2> Element::reference_nodes() const
{
  std::vector<Point2> nodes{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (_degree == 2)
  {
    nodes.emplace_back(0.5, 0.5);
    nodes.emplace_back(0.0, 0.5);
    nodes.emplace_back(0.5, 0.0);
  }
  return nodes;
}

void Element::eval(const Point2& ref, BasisValues& values, BasisGradients& gradients) const
{
  const std::array<double, 3> lambda{1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
  const std::array<Point2, 3> dlambda{Point2(-1.0, -1.0), Point2(1.0, 0.0), Point2(0.0, 1.0)};

  values.resize(num_dofs());
  gradients.resize(num_dofs(), 2);
  if (_degree == 1)
  {
    for (int k = 0; k < 3; ++k)
    {
      values[k] = lambda[k];
      gradients.row(k) = dlambda[k].transpose();
    }
    return;
  }

  for (int k = 0; k < 3; ++k)
  {
    values[k] = lambda[k] * (2.0 * lambda[k] - 1.0);
    gradients.row(k) = ((4.0 * lambda[k] - 1.0) * dlambda[k]).transpose();

    const int a = (k + 1) % 3;
    const int b = (k + 2) % 3;
    values[3 + k] = 4.0 * lambda[a] * lambda[b];
    gradients.row(3 + k) = (4.0 * (lambda[a] * dlambda[b] + lambda[b] * dlambda[a])).transpose();
  }
}

AffineMap::AffineMap(const Triangle& t) : origin(t[0])
{
  jacobian.col(0) = t[1] - t[0];
  jacobian.col(1) = t[2] - t[0];
  inverse = jacobian.inverse();
}

Point2 AffineMap::to_reference(const Point2& x, double clamp_tol) const
{
  Point2 ref = inverse * (x - origin);
  const double l0 = 1.0 - ref.x() - ref.y();
  const double worst = std::min({l0, ref.x(), ref.y()});
  if (worst < 0.0 && worst >= -clamp_tol)
  {
    Eigen::Vector3d lambda(std::max(l0, 0.0), std::max(ref.x(), 0.0), std::max(ref.y(), 0.0));
    lambda /= lambda.sum();
    ref = Point2(lambda[1], lambda[2]);
  }
  return ref;
}

DofMap build_dofmap(const Mesh& mesh, const Element& element)
{
  DofMap map;
  const int nv = static_cast<int>(mesh.num_vertices());
  map.num_dofs = nv;
  map.dof_coordinates = mesh.vertices();
  map.cell_dofs.resize(mesh.num_cells());

  std::map<std::pair<int, int>, int> edge_dofs;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    const auto& cell = mesh.cells()[c];
    auto& dofs = map.cell_dofs[c];
    dofs.fill(-1);
    for (int k = 0; k < 3; ++k)
      dofs[k] = cell[k];
    if (element.degree() == 1)
      continue;

    // Edge DOFs keyed by the sorted global vertex pair.
    for (int e = 0; e < 3; ++e)
    {
      const auto lv = Mesh::edge_local_vertices(e);
      const auto key = std::minmax(cell[lv[0]], cell[lv[1]]);
      auto [it, inserted] = edge_dofs.try_emplace(key, map.num_dofs);
      if (inserted)
      {
        map.num_dofs++;
        map.dof_coordinates.push_back(
          0.5 * (mesh.vertices()[key.first] + mesh.vertices()[key.second]));
      }
      dofs[3 + e] = it->second;
    }
  }

  map.on_boundary.assign(map.num_dofs, false);
  for (const auto& f : mesh.boundary_facets())
  {
    const auto lv = Mesh::edge_local_vertices(f.local_edge);
    const auto& dofs = map.cell_dofs[f.cell];
    map.on_boundary[dofs[lv[0]]] = true;
    map.on_boundary[dofs[lv[1]]] = true;
    if (element.degree() == 2)
      map.on_boundary[dofs[3 + f.local_edge]] = true;
  }
  return map;
}

MultiMeshFunctionSpace::MultiMeshFunctionSpace(std::shared_ptr<const MultiMesh> mm, int degree)
  : _mm(std::move(mm)), _element(degree)
{
  _offsets.push_back(0);
  for (int i = 0; i < _mm->num_parts(); ++i)
  {
    _dofmaps.push_back(build_dofmap(_mm->part(i), _element));
    _offsets.push_back(_offsets.back() + _dofmaps.back().num_dofs);
  }

  _inactive.assign(num_dofs(), true);
  const int n = _element.num_dofs();
  for (int i = 0; i < num_parts(); ++i)
    for (std::size_t c = 0; c < _mm->part(i).num_cells(); ++c)
      if (_mm->is_active(i, static_cast<int>(c)))
        for (int k = 0; k < n; ++k)
          _inactive[_offsets[i] + _dofmaps[i].cell_dofs[c][k]] = false;
}

std::array<int, 6> MultiMeshFunctionSpace::cell_dofs(int part, int cell) const
{
  auto dofs = _dofmaps[part].cell_dofs[cell];
  for (int k = 0; k < _element.num_dofs(); ++k)
    dofs[k] += _offsets[part];
  return dofs;
}

std::vector<int> MultiMeshFunctionSpace::inactive_dofs() const
{
  std::vector<int> dofs;
  for (int d = 0; d < num_dofs(); ++d)
    if (_inactive[d])
      dofs.push_back(d);
  return dofs;
}

std::shared_ptr<const MultiMeshFunctionSpace> build_space(std::shared_ptr<const MultiMesh> mm,
                                                          int degree)
{
  return std::make_shared<const MultiMeshFunctionSpace>(std::move(mm), degree);
}

MultiMeshFunction::MultiMeshFunction(std::shared_ptr<const MultiMeshFunctionSpace> space)
  : _space(std::move(space)), _coefficients(Eigen::VectorXd::Zero(_space->num_dofs()))
{
}

MultiMeshFunction::MultiMeshFunction(std::shared_ptr<const MultiMeshFunctionSpace> space,
                                     Eigen::VectorXd coefficients)
  : _space(std::move(space)), _coefficients(std::move(coefficients))
{
  if (_coefficients.size() != _space->num_dofs())
    throw std::invalid_argument("MultiMeshFunction: coefficient vector has wrong length");
}

double MultiMeshFunction::eval_on_cell(int part, int cell, const Point2& x) const
{
  const AffineMap map(_space->multimesh().part(part).cell_triangle(cell));
  BasisValues values;
  BasisGradients gradients;
  _space->element().eval(map.to_reference(x), values, gradients);
  const auto dofs = _space->cell_dofs(part, cell);
  double sum = 0.0;
  for (int k = 0; k < values.size(); ++k)
    sum += values[k] * _coefficients[dofs[k]];
  return sum;
}

Point2 MultiMeshFunction::gradient_on_cell(int part, int cell, const Point2& x) const
{
  const AffineMap map(_space->multimesh().part(part).cell_triangle(cell));
  BasisValues values;
  BasisGradients gradients;
  _space->element().eval(map.to_reference(x), values, gradients);
  const auto dofs = _space->cell_dofs(part, cell);
  Point2 ref_gradient = Point2::Zero();
  for (int k = 0; k < values.size(); ++k)
    ref_gradient += _coefficients[dofs[k]] * gradients.row(k).transpose();
  return map.inverse.transpose() * ref_gradient;
}

namespace
{

CellRef locate_or_throw(const MultiMesh& mm, const Point2& x)
{
  const auto found = mm.locate_point(x);
  if (!found)
  {
    std::ostringstream msg;
    msg.precision(17);
    msg << "evaluate: point (" << x.x() << ", " << x.y() << ") is outside every part";
    throw std::out_of_range(msg.str());
  }
  return *found;
}

} // namespace

double evaluate(const MultiMeshFunction& f, const Point2& x)
{
  const auto at = locate_or_throw(f.space().multimesh(), x);
  return f.eval_on_cell(at.part, at.cell, x);
}

Point2 evaluate_gradient(const MultiMeshFunction& f, const Point2& x)
{
  const auto at = locate_or_throw(f.space().multimesh(), x);
  return f.gradient_on_cell(at.part, at.cell, x);
}

MultiMeshFunction interpolate(const ScalarField& g,
                              std::shared_ptr<const MultiMeshFunctionSpace> space)
{
  MultiMeshFunction f(space);
  for (int i = 0; i < space->num_parts(); ++i)
  {
    const auto& map = space->dofmap(i);
    for (int d = 0; d < map.num_dofs; ++d)
    {
      const int global = space->offset(i) + d;
      if (!space->inactive()[global])
        f.coefficients()[global] = g(map.dof_coordinates[d]);
    }
  }
  return f;
}

} // namespace mmfem
