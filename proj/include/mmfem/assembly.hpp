#pragma once

#include "mmfem/fespace.hpp"
#include "mmfem/linalg.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace mmfem
{

enum class StabilizationKind
{
  gradient_jump, // beta1 ([grad v], [grad w]) over overlaps
  value_jump_h2  // beta1 (h_i^-2 + h_j^-2) ([v], [w]) over overlaps
};

/// -Δu = f in Ω, u = g on ∂Ω (g = 0 unless a lifting is supplied).
struct PoissonProblem
{
  ScalarField f;
  double beta0 = 10.0;
  double beta1 = 10.0;
  StabilizationKind stabilization = StabilizationKind::gradient_jump;
};

/// Accumulates matrix triplets and a load vector for one global DOF space.
struct SystemBuilder
{
  explicit SystemBuilder(int num_dofs) : n(num_dofs), b(Vector::Zero(num_dofs)) {}

  int n;
  std::vector<Eigen::Triplet<double>> triplets;
  Vector b;

  SparseMatrix matrix() const;
};

struct AssembledSystem
{
  SparseMatrix A;
  Vector b;
  std::vector<int> dirichlet_dofs;
  std::vector<int> pinned_dofs;

  /// Constrained rows (Dirichlet and pinned), as a mask.
  std::vector<bool> constrained_mask() const;
};

/// Σ_i (∇v_i, ∇w_i)_{Ω_i} and Σ_i (f, v_i)_{Ω_i} over visible cell parts.
void assemble_volume(const MultiMeshFunctionSpace& space, const PoissonProblem& problem,
                     SystemBuilder& system);

/// Symmetric Nitsche coupling on every Γ_ij piece with average weight 1/2
/// and penalty beta0 (h_i^-1 + h_j^-1).
void assemble_interface(const MultiMeshFunctionSpace& space, const PoissonProblem& problem,
                        SystemBuilder& system);

/// Overlap stabilization on every O_ij piece, variant per problem.stabilization.
void assemble_overlap_stab(const MultiMeshFunctionSpace& space, const PoissonProblem& problem,
                           SystemBuilder& system);

/// Strong conditions by symmetric elimination: boundary DOFs of part 0 get
/// the values of `boundary_values` (zero when empty), inactive DOFs are
/// pinned to zero. Constrained rows and columns become identity.
AssembledSystem apply_dirichlet(const SystemBuilder& system, const MultiMeshFunctionSpace& space,
                                const ScalarField& boundary_values = {});

/// Constrains only the inactive DOFs (no boundary condition).
AssembledSystem pin_inactive(const SystemBuilder& system, const MultiMeshFunctionSpace& space);

AssembledSystem assemble_poisson(const MultiMeshFunctionSpace& space, const PoissonProblem& problem,
                                 const ScalarField& boundary_values = {});

/// Stabilized L2 projection of -∂φ/∂x_component onto `space`:
/// mass terms on visible parts, beta0 (h_i^-1 + h_j^-1) value jumps on Γ_ij
/// and beta1 (h_i^-2 + h_j^-2) value jumps on O_ij.
AssembledSystem assemble_projection(const MultiMeshFunctionSpace& space,
                                    const MultiMeshFunction& phi, int component, double beta0,
                                    double beta1);

/// Solves an assembled system with Jacobi CG and wraps the result.
/// Throws std::runtime_error if CG does not converge.
MultiMeshFunction solve(const AssembledSystem& system,
                        std::shared_ptr<const MultiMeshFunctionSpace> space, double rtol = 1e-12,
                        SolveReport* report = nullptr);

} // namespace mmfem
