#pragma once

#include "mmfem/assembly.hpp"
#include "mmfem/fespace.hpp"
#include "mmfem/multimesh.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmfem
{

enum class StudyKind
{
  convergence,
  thin,
  condition_scaling,
  electrostatics
};

struct StudyConfig
{
  StudyKind kind = StudyKind::convergence;
  int N = 0;                 // number of overlapping parts
  int p = 1;                 // polynomial degree
  int levels = 4;            // refinement levels
  int coarse = 8;            // cells per unit length on the coarsest level
  unsigned seed = 0;
  std::optional<double> beta0; // study default when unset
  std::optional<double> beta1;
  std::vector<int> ks{0, 8, 16, 32, 52}; // thin-intersection steps
  double x0 = 2.48e-16;      // left offset of the first inner part (condition scaling)
  int steps = 50;            // electrostatics time steps
  double dt = 0.2;
  int snapshot_every = 0;    // 0 disables field snapshots
  int background_cells = 48; // electrostatics background resolution per side
  int body_cells = 4;        // radial subdivisions of each body mesh
  std::string out_dir;       // empty: no files written
  bool dump_rules = false;     // cut-cell and interface rules, `x,y,w`
  bool dump_matrix = false;    // assembled matrix, `row col value`
  bool dump_multimesh = false; // multimesh diagnostics JSON
};

StudyKind study_kind_from_string(const std::string& name);
StudyConfig config_from_json(const nlohmann::json& j, StudyKind kind);
nlohmann::json config_to_json(const StudyConfig& cfg);

using GradientField = std::function<Point2(const Point2&)>;

struct ErrorNorms
{
  double l2;
  double h1; // H^1_0 seminorm of the error
};

/// Errors of u_h against an exact solution, integrated over the visible part
/// of every part with the multimesh rules at the given order.
ErrorNorms error_norms(const MultiMeshFunction& u, const ScalarField& exact,
                       const GradientField& exact_gradient, int order);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

// Manufactured solution sin(πx) sin(πy) with f = 2π² sin(πx) sin(πy).
double exact_solution(const Point2& x);
Point2 exact_gradient(const Point2& x);
double exact_rhs(const Point2& x);

/// Randomly placed, scaled and rotated square.
struct SquarePlacement
{
  Point2 center;
  double side;
  double angle;
};

/// Seeded placements: side in [0.1, 0.4], angle in [0, 2π), corners kept
/// 0.05 away from the boundary of the unit square.
std::vector<SquarePlacement> random_squares(int count, unsigned seed);
Mesh square_mesh(const SquarePlacement& s, int cells_per_unit);

struct LevelResult
{
  int level;
  double h;
  int ndof;
  double err_l2;
  double err_h1;
  int cg_iterations;
  std::vector<int> covered_parts; // parts without any active cell
};

struct RateReport
{
  int N;
  int p;
  std::vector<LevelResult> levels;
  double rate_l2;
  double rate_h1;
};

RateReport run_convergence(const StudyConfig& cfg);

/// Background [-0.25,1.25]², part 1 = [0,1]², parts 2..N the thin rectangles
/// [x0_i, x0_i + w_i] x [a_i, 1 - a_i] with a_i = iπ/(10N), w_i = 1 - 2a_i,
/// x0_i = offset_scale * a_i.
std::vector<Mesh> thin_parts(int N, double offset_scale, int cells_per_unit);

struct ThinResult
{
  int N;
  int k;
  double x0;
  double err_l2;
  double err_h1;
  double kappa;
};

std::vector<ThinResult> run_thin_intersection(const StudyConfig& cfg);

struct ConditionResult
{
  int level;
  double h;
  double kappa;
  int cg_iterations;
};

struct ConditionReport
{
  std::vector<ConditionResult> levels;
  double slope;
};

ConditionReport run_condition_scaling(const StudyConfig& cfg);

// Electrostatics of charged rigid bodies.

/// Boundary-fitted mesh around a convex polygon: the polygon itself is meshed
/// by subdivided centroid fans (interior cells) and surrounded by a ring out
/// to `ring_factor` times the polygon (exterior cells).
struct BodyMesh
{
  Mesh mesh;
  std::vector<bool> interior;
};

BodyMesh body_mesh(std::span<const Point2> polygon, int subdivisions, double ring_factor = 2.0);

struct RigidBody
{
  std::vector<Point2> outline; // convex, counter-clockwise, centroid at origin
  BodyMesh reference_mesh;
  double charge_density = 10.0;
  double mass = 0.0;
  double inertia = 0.0;
  Point2 center = Point2::Zero();
  Point2 velocity = Point2::Zero();
  double angular_velocity = 0.0;
  double angle = 0.0;

  std::vector<Point2> world_outline() const;
  Mesh world_mesh() const;
};

/// Centers the outline at its centroid and fills mass (unit mass density)
/// and polar moment of inertia.
RigidBody make_body(std::vector<Point2> outline, int subdivisions);

struct BodyLoad
{
  Point2 force;
  double torque;
};

struct ElectroFields
{
  std::shared_ptr<const MultiMesh> mm;
  std::shared_ptr<const MultiMeshFunctionSpace> space;
  std::optional<MultiMeshFunction> phi;
  std::optional<MultiMeshFunction> ex;
  std::optional<MultiMeshFunction> ey;
  std::vector<BodyLoad> loads;
  double max_interface_jump = 0.0;
};

struct ElectroSetup
{
  double box = 1.0;        // bodies bounce inside [-box, box]²
  double background = 3.0; // background mesh is [-background, background]²
  int background_cells = 48;
  double beta0 = 10.0;
  double beta1 = 1.0;
};

/// One potential solve, field projection and force/torque evaluation for the
/// current body poses.
ElectroFields solve_electrostatics(const ElectroSetup& setup, std::span<const RigidBody> bodies);

struct TrajectoryRow
{
  int step;
  double t;
  int body;
  Point2 center;
  Point2 velocity;
  double omega;
  double theta;
  Point2 force;
  double torque;
};

struct ElectroReport
{
  std::vector<TrajectoryRow> trajectory;
  std::vector<RigidBody> final_bodies;
  bool all_inside_box = true;
};

/// Symplectic Euler update (velocities from the current loads, then poses
/// from the new velocities) followed by elastic reflection at the box walls.
void advance_bodies(std::span<RigidBody> bodies, std::span<const BodyLoad> loads, double dt,
                    double box);

std::vector<RigidBody> default_bodies(int subdivisions);

ElectroReport run_electrostatics(const StudyConfig& cfg);

/// Runs the configured study and writes its CSV (and metadata) to cfg.out_dir.
void run_study(const StudyConfig& cfg);

} // namespace mmfem
