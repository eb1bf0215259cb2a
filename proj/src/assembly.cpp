#include "mmfem/assembly.hpp"

#include <sstream>
#include <stdexcept>

namespace mmfem
{
namespace
{

using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 12, 12>;
using LocalVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 12, 1>;

/// Basis of one cell evaluated at physical points.
class CellBasis
{
public:
  CellBasis(const MultiMeshFunctionSpace& space, int part, int cell)
    : _element(space.element()),
      _map(space.multimesh().part(part).cell_triangle(cell)),
      _dofs(space.cell_dofs(part, cell))
  {
  }

  int size() const { return _element.num_dofs(); }
  const std::array<int, 6>& dofs() const { return _dofs; }

  /// Values and physical gradients at x.
  void eval(const Point2& x, BasisValues& values, BasisGradients& gradients) const
  {
    _element.eval(_map.to_reference(x), values, gradients);
    gradients = gradients * _map.inverse;
  }

private:
  const Element& _element;
  AffineMap _map;
  std::array<int, 6> _dofs;
};

void add_local(SystemBuilder& system, const LocalMatrix& local, const std::vector<int>& dofs)
{
  for (int a = 0; a < local.rows(); ++a)
    for (int b = 0; b < local.cols(); ++b)
      if (local(a, b) != 0.0)
        system.triplets.emplace_back(dofs[a], dofs[b], local(a, b));
}

std::vector<int> cell_dofs(const CellBasis& basis)
{
  return {basis.dofs().begin(), basis.dofs().begin() + basis.size()};
}

std::vector<int> pair_dofs(const CellBasis& first, const CellBasis& second)
{
  std::vector<int> dofs;
  for (int k = 0; k < first.size(); ++k)
    dofs.push_back(first.dofs()[k]);
  for (int k = 0; k < second.size(); ++k)
    dofs.push_back(second.dofs()[k]);
  return dofs;
}

/// Mass-type volume term Σ (u, v)_{Ω_i} and a load Σ (g_i, v)_{Ω_i} where
/// g_i may depend on the part and cell.
template <typename Load>
void assemble_mass_volume(const MultiMeshFunctionSpace& space, SystemBuilder& system, Load&& load)
{
  const MultiMesh& mm = space.multimesh();
  BasisValues v;
  BasisGradients g;
  for (int i = 0; i < mm.num_parts(); ++i)
    for (std::size_t c = 0; c < mm.part(i).num_cells(); ++c)
    {
      const int cell = static_cast<int>(c);
      if (!mm.is_active(i, cell))
        continue;
      const auto rule = mm.visible_rule(i, cell);
      const CellBasis basis(space, i, cell);
      const int n = basis.size();
      LocalMatrix local = LocalMatrix::Zero(n, n);
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        basis.eval(rule.points[q], v, g);
        local.noalias() += rule.weights[q] * (v * v.transpose());
        const double source = load(i, cell, rule.points[q]);
        for (int a = 0; a < n; ++a)
          system.b[basis.dofs()[a]] += rule.weights[q] * source * v[a];
      }
      add_local(system, local, cell_dofs(basis));
    }
}

/// beta * ([u], [v]) over every interface piece, with beta per (i, j).
template <typename Scale>
void assemble_interface_penalty(const MultiMeshFunctionSpace& space, SystemBuilder& system,
                                Scale&& scale)
{
  const MultiMesh& mm = space.multimesh();
  BasisValues vi, vj;
  BasisGradients gi, gj;
  for (const auto& entry : mm.interfaces())
  {
    const CellBasis bi(space, entry.i, entry.cell_i);
    const CellBasis bj(space, entry.j, entry.cell_j);
    const int n = bi.size();
    const double beta = scale(entry.i, entry.j);
    LocalMatrix local = LocalMatrix::Zero(2 * n, 2 * n);
    LocalVector jump(2 * n);
    const auto& rule = entry.rule.rule;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      bi.eval(rule.points[q], vi, gi);
      bj.eval(rule.points[q], vj, gj);
      jump << vi, -vj;
      local.noalias() += rule.weights[q] * beta * (jump * jump.transpose());
    }
    add_local(system, local, pair_dofs(bi, bj));
  }
}

template <typename Scale>
void assemble_overlap_value_jump(const MultiMeshFunctionSpace& space, SystemBuilder& system,
                                 Scale&& scale)
{
  const MultiMesh& mm = space.multimesh();
  BasisValues vi, vj;
  BasisGradients gi, gj;
  for (const auto& entry : mm.overlaps())
  {
    const CellBasis bi(space, entry.i, entry.cell_i);
    const CellBasis bj(space, entry.j, entry.cell_j);
    const int n = bi.size();
    const double beta = scale(entry.i, entry.j);
    LocalMatrix local = LocalMatrix::Zero(2 * n, 2 * n);
    LocalVector jump(2 * n);
    for (std::size_t q = 0; q < entry.rule.size(); ++q)
    {
      bi.eval(entry.rule.points[q], vi, gi);
      bj.eval(entry.rule.points[q], vj, gj);
      jump << vi, -vj;
      local.noalias() += entry.rule.weights[q] * beta * (jump * jump.transpose());
    }
    add_local(system, local, pair_dofs(bi, bj));
  }
}

AssembledSystem eliminate(const SystemBuilder& system, std::vector<int> dirichlet,
                          const Vector& values, std::vector<int> pinned)
{
  const SparseMatrix A = system.matrix();
  std::vector<bool> constrained(system.n, false);
  for (int d : dirichlet)
    constrained[d] = true;
  for (int d : pinned)
    constrained[d] = true;

  // Lift the prescribed values into the right-hand side.
  Vector b = system.b - A * values;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(A.nonZeros());
  for (int row = 0; row < A.outerSize(); ++row)
  {
    if (constrained[row])
      continue;
    for (SparseMatrix::InnerIterator it(A, row); it; ++it)
      if (!constrained[it.col()])
        triplets.emplace_back(row, static_cast<int>(it.col()), it.value());
  }
  for (int d = 0; d < system.n; ++d)
    if (constrained[d])
    {
      triplets.emplace_back(d, d, 1.0);
      b[d] = values[d];
    }

  AssembledSystem out;
  out.A.resize(system.n, system.n);
  out.A.setFromTriplets(triplets.begin(), triplets.end());
  out.b = std::move(b);
  out.dirichlet_dofs = std::move(dirichlet);
  out.pinned_dofs = std::move(pinned);
  return out;
}

} // namespace

SparseMatrix SystemBuilder::matrix() const
{
  SparseMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

std::vector<bool> AssembledSystem::constrained_mask() const
{
  std::vector<bool> mask(A.rows(), false);
  for (int d : dirichlet_dofs)
    mask[d] = true;
  for (int d : pinned_dofs)
    mask[d] = true;
  return mask;
}

void assemble_volume(const MultiMeshFunctionSpace& space, const PoissonProblem& problem,
                     SystemBuilder& system)
{
  const MultiMesh& mm = space.multimesh();
  BasisValues v;
  BasisGradients g;
  for (int i = 0; i < mm.num_parts(); ++i)
    for (std::size_t c = 0; c < mm.part(i).num_cells(); ++c)
    {
      const int cell = static_cast<int>(c);
      if (!mm.is_active(i, cell))
        continue;
      // CUT cells integrate with their signed rules as they are.
      const auto rule = mm.visible_rule(i, cell);
      const CellBasis basis(space, i, cell);
      const int n = basis.size();
      LocalMatrix local = LocalMatrix::Zero(n, n);
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        basis.eval(rule.points[q], v, g);
        local.noalias() += rule.weights[q] * (g * g.transpose());
        if (problem.f)
        {
          const double fq = problem.f(rule.points[q]);
          for (int a = 0; a < n; ++a)
            system.b[basis.dofs()[a]] += rule.weights[q] * fq * v[a];
        }
      }
      add_local(system, local, cell_dofs(basis));
    }
}

void assemble_interface(const MultiMeshFunctionSpace& space, const PoissonProblem& problem,
                        SystemBuilder& system)
{
  const MultiMesh& mm = space.multimesh();
  BasisValues vi, vj;
  BasisGradients gi, gj;
  for (const auto& entry : mm.interfaces())
  {
    const CellBasis bi(space, entry.i, entry.cell_i);
    const CellBasis bj(space, entry.j, entry.cell_j);
    const int n = bi.size();
    const double penalty = problem.beta0 * (1.0 / mm.h(entry.i) + 1.0 / mm.h(entry.j));
    const Point2& normal = entry.rule.normal;

    LocalMatrix local = LocalMatrix::Zero(2 * n, 2 * n);
    LocalVector jump(2 * n);
    LocalVector flux(2 * n);
    const auto& rule = entry.rule.rule;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      bi.eval(rule.points[q], vi, gi);
      bj.eval(rule.points[q], vj, gj);
      jump << vi, -vj;
      flux << 0.5 * (gi * normal), 0.5 * (gj * normal);
      local.noalias() += rule.weights[q]
                         * (-flux * jump.transpose() - jump * flux.transpose()
                            + penalty * jump * jump.transpose());
    }
    add_local(system, local, pair_dofs(bi, bj));
  }
}

void assemble_overlap_stab(const MultiMeshFunctionSpace& space, const PoissonProblem& problem,
                           SystemBuilder& system)
{
  if (problem.beta1 == 0.0)
    return;
  const MultiMesh& mm = space.multimesh();

  if (problem.stabilization == StabilizationKind::value_jump_h2)
  {
    assemble_overlap_value_jump(space, system, [&](int i, int j) {
      return problem.beta1 * (1.0 / (mm.h(i) * mm.h(i)) + 1.0 / (mm.h(j) * mm.h(j)));
    });
    return;
  }

  BasisValues vi, vj;
  BasisGradients gi, gj;
  for (const auto& entry : mm.overlaps())
  {
    const CellBasis bi(space, entry.i, entry.cell_i);
    const CellBasis bj(space, entry.j, entry.cell_j);
    const int n = bi.size();
    LocalMatrix local = LocalMatrix::Zero(2 * n, 2 * n);
    LocalVector jx(2 * n), jy(2 * n);
    for (std::size_t q = 0; q < entry.rule.size(); ++q)
    {
      bi.eval(entry.rule.points[q], vi, gi);
      bj.eval(entry.rule.points[q], vj, gj);
      jx << gi.col(0), -gj.col(0);
      jy << gi.col(1), -gj.col(1);
      local.noalias() += entry.rule.weights[q] * problem.beta1
                         * (jx * jx.transpose() + jy * jy.transpose());
    }
    add_local(system, local, pair_dofs(bi, bj));
  }
}

AssembledSystem apply_dirichlet(const SystemBuilder& system, const MultiMeshFunctionSpace& space,
                                const ScalarField& boundary_values)
{
  const auto& background = space.dofmap(0);
  std::vector<int> dirichlet;
  Vector values = Vector::Zero(system.n);
  for (int d = 0; d < background.num_dofs; ++d)
    if (background.on_boundary[d])
    {
      dirichlet.push_back(d);
      if (boundary_values)
        values[d] = boundary_values(background.dof_coordinates[d]);
    }

  std::vector<int> pinned;
  for (int d : space.inactive_dofs())
    if (!(d < background.num_dofs && background.on_boundary[d]))
      pinned.push_back(d);
  return eliminate(system, std::move(dirichlet), values, std::move(pinned));
}

AssembledSystem pin_inactive(const SystemBuilder& system, const MultiMeshFunctionSpace& space)
{
  return eliminate(system, {}, Vector::Zero(system.n), space.inactive_dofs());
}

AssembledSystem assemble_poisson(const MultiMeshFunctionSpace& space, const PoissonProblem& problem,
                                 const ScalarField& boundary_values)
{
  if (!(problem.beta0 > 0.0) || problem.beta1 < 0.0)
    throw std::invalid_argument("assemble_poisson: beta0 must be positive and beta1 non-negative");
  SystemBuilder system(space.num_dofs());
  assemble_volume(space, problem, system);
  assemble_interface(space, problem, system);
  assemble_overlap_stab(space, problem, system);
  return apply_dirichlet(system, space, boundary_values);
}

AssembledSystem assemble_projection(const MultiMeshFunctionSpace& space,
                                    const MultiMeshFunction& phi, int component, double beta0,
                                    double beta1)
{
  if (&space.multimesh() != &phi.space().multimesh())
    throw std::invalid_argument("assemble_projection: spaces live on different multimeshes");
  if (component < 0 || component > 1)
    throw std::invalid_argument("assemble_projection: component must be 0 or 1");

  const MultiMesh& mm = space.multimesh();
  SystemBuilder system(space.num_dofs());
  assemble_mass_volume(space, system, [&](int part, int cell, const Point2& x) {
    return -phi.gradient_on_cell(part, cell, x)[component];
  });
  assemble_interface_penalty(space, system, [&](int i, int j) {
    return beta0 * (1.0 / mm.h(i) + 1.0 / mm.h(j));
  });
  assemble_overlap_value_jump(space, system, [&](int i, int j) {
    return beta1 * (1.0 / (mm.h(i) * mm.h(i)) + 1.0 / (mm.h(j) * mm.h(j)));
  });
  return pin_inactive(system, space);
}

MultiMeshFunction solve(const AssembledSystem& system,
                        std::shared_ptr<const MultiMeshFunctionSpace> space, double rtol,
                        SolveReport* report)
{
  Vector x;
  CGOptions options;
  options.rtol = rtol;
  const auto result = cg_solve(system.A, system.b, x, options);
  if (report)
    *report = result;
  if (!result.converged)
  {
    std::ostringstream msg;
    msg << "solve: CG did not converge (relative residual " << std::scientific
        << result.relative_residual << " after " << result.iterations << " iterations)";
    throw std::runtime_error(msg.str());
  }
  return MultiMeshFunction(std::move(space), std::move(x));
}

} // namespace mmfem
