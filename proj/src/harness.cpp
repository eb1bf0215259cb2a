#include "mmfem/harness.hpp"

#include "mmfem/io.hpp"
#include "mmfem/predicates.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mmfem
{

namespace
{

constexpr double pi = std::numbers::pi;

// Jacobi-CG on the finest P2 systems floors at a true relative residual of
// about 2e-12; 1e-10 is far below every discretization error measured here.
constexpr double study_rtol = 1e-10;

std::ofstream open_output(const std::string& dir, const std::string& name)
{
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name);
  if (!out)
    throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
  out << std::setprecision(17);
  return out;
}

double max_h(const MultiMesh& mm)
{
  double h = 0.0;
  for (int i = 0; i < mm.num_parts(); ++i)
    h = std::max(h, mm.h(i));
  return h;
}

std::vector<int> fully_covered_parts(const MultiMesh& mm)
{
  std::vector<int> covered;
  for (int i = 1; i < mm.num_parts(); ++i)
  {
    const auto& cls = mm.classes(i);
    if (std::all_of(cls.begin(), cls.end(), [](CellClass c) { return c == CellClass::covered; }))
      covered.push_back(i);
  }
  return covered;
}

bool inside_convex(std::span<const Point2> polygon, const Point2& x)
{
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k)
    if (orient2d(polygon[k], polygon[(k + 1) % n], x) < 0)
      return false;
  return true;
}

/// Optional per-solve artifacts, named after `tag`.
void write_dumps(const StudyConfig& cfg, const MultiMesh& mm, const SparseMatrix* A,
                 const std::string& tag)
{
  if (cfg.out_dir.empty())
    return;
  if (cfg.dump_multimesh)
    open_output(cfg.out_dir, "multimesh_" + tag + ".json")
        << io::multimesh_diagnostics(mm).dump(2) << "\n";
  if (cfg.dump_matrix && A)
  {
    auto out = open_output(cfg.out_dir, "matrix_" + tag + ".txt");
    io::write_matrix_coordinate(out, *A);
  }
  if (cfg.dump_rules)
  {
    auto out = open_output(cfg.out_dir, "rules_" + tag + ".csv");
    out << "x,y,w\n";
    for (int part = 0; part < mm.num_parts(); ++part)
      for (int c = 0; c < static_cast<int>(mm.part(part).num_cells()); ++c)
        if (mm.cell_class(part, c) == CellClass::cut)
          io::write_rule_csv(out, mm.cut_rule(part, c), false);
    auto iface = open_output(cfg.out_dir, "interface_rules_" + tag + ".csv");
    iface << "x,y,w\n";
    for (const auto& e : mm.interfaces())
      io::write_rule_csv(iface, e.rule.rule, false);
  }
}

} // namespace

StudyKind study_kind_from_string(const std::string& name)
{
  if (name == "convergence")
    return StudyKind::convergence;
  if (name == "thin")
    return StudyKind::thin;
  if (name == "condscale" || name == "condition_scaling")
    return StudyKind::condition_scaling;
  if (name == "electro" || name == "electrostatics")
    return StudyKind::electrostatics;
  throw std::invalid_argument("unknown study: " + name);
}

static const char* study_name(StudyKind k)
{
  switch (k)
  {
  case StudyKind::convergence:
    return "convergence";
  case StudyKind::thin:
    return "thin";
  case StudyKind::condition_scaling:
    return "condscale";
  case StudyKind::electrostatics:
    return "electro";
  }
  return "";
}

StudyConfig config_from_json(const nlohmann::json& j, StudyKind kind)
{
  StudyConfig cfg;
  cfg.kind = kind;
  if (j.contains("study"))
    cfg.kind = study_kind_from_string(j.at("study").get<std::string>());
  cfg.N = j.value("N", cfg.N);
  cfg.p = j.value("p", cfg.p);
  cfg.levels = j.value("levels", cfg.levels);
  cfg.coarse = j.value("coarse", cfg.coarse);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("beta0") && !j["beta0"].is_null())
    cfg.beta0 = j["beta0"].get<double>();
  if (j.contains("beta1") && !j["beta1"].is_null())
    cfg.beta1 = j["beta1"].get<double>();
  cfg.ks = j.value("ks", cfg.ks);
  cfg.x0 = j.value("x0", cfg.x0);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.snapshot_every = j.value("snapshot_every", cfg.snapshot_every);
  cfg.background_cells = j.value("background_cells", cfg.background_cells);
  cfg.body_cells = j.value("body_cells", cfg.body_cells);
  cfg.out_dir = j.value("out", cfg.out_dir);

  if (cfg.p != 1 && cfg.p != 2)
    throw std::invalid_argument("p must be 1 or 2");
  if (cfg.N < 0)
    throw std::invalid_argument("N must be non-negative");
  if (cfg.coarse < 1)
    throw std::invalid_argument("coarse must be positive");
  if ((cfg.kind == StudyKind::convergence || cfg.kind == StudyKind::condition_scaling)
      && cfg.levels < 2)
    throw std::invalid_argument("rate fitting needs at least 2 levels");
  if (cfg.steps < 0 || cfg.dt <= 0.0)
    throw std::invalid_argument("invalid time stepping");
  return cfg;
}

nlohmann::json config_to_json(const StudyConfig& cfg)
{
  nlohmann::json j;
  j["study"] = study_name(cfg.kind);
  j["N"] = cfg.N;
  j["p"] = cfg.p;
  j["levels"] = cfg.levels;
  j["coarse"] = cfg.coarse;
  j["seed"] = cfg.seed;
  j["beta0"] = cfg.beta0 ? nlohmann::json(*cfg.beta0) : nlohmann::json();
  j["beta1"] = cfg.beta1 ? nlohmann::json(*cfg.beta1) : nlohmann::json();
  j["ks"] = cfg.ks;
  j["x0"] = cfg.x0;
  j["steps"] = cfg.steps;
  j["dt"] = cfg.dt;
  j["snapshot_every"] = cfg.snapshot_every;
  j["background_cells"] = cfg.background_cells;
  j["body_cells"] = cfg.body_cells;
  return j;
}

ErrorNorms error_norms(const MultiMeshFunction& u, const ScalarField& exact,
                       const GradientField& exact_gradient, int order)
{
  const MultiMesh& mm = u.space().multimesh();
  order = std::min(order, 10);
  double l2 = 0.0, h1 = 0.0;
  for (int part = 0; part < mm.num_parts(); ++part)
  {
    for (int c = 0; c < static_cast<int>(mm.part(part).num_cells()); ++c)
    {
      if (!mm.is_active(part, c))
        continue;
      const QuadratureRule rule = mm.visible_rule(part, c, order);
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        const Point2& x = rule.points[q];
        const double e = u.eval_on_cell(part, c, x) - exact(x);
        const Point2 g = u.gradient_on_cell(part, c, x) - exact_gradient(x);
        l2 += rule.weights[q] * e * e;
        h1 += rule.weights[q] * g.squaredNorm();
      }
    }
  }
  // Signed rules can leave tiny negative round-off for exact solutions.
  return {std::sqrt(std::max(l2, 0.0)), std::sqrt(std::max(h1, 0.0))};
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs at least two paired samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k)
  {
    if (!(x[k] > 0.0) || !(y[k] > 0.0))
      throw std::invalid_argument("slope fit needs positive samples");
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0)
    throw std::invalid_argument("slope fit needs distinct abscissae");
  return (n * sxy - sx * sy) / denom;
}

double exact_solution(const Point2& x)
{
  return std::sin(pi * x.x()) * std::sin(pi * x.y());
}

Point2 exact_gradient(const Point2& x)
{
  return {pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
          pi * std::sin(pi * x.x()) * std::cos(pi * x.y())};
}

double exact_rhs(const Point2& x)
{
  return 2.0 * pi * pi * exact_solution(x);
}

std::vector<SquarePlacement> random_squares(int count, unsigned seed)
{
  constexpr double margin = 0.05;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SquarePlacement> squares;
  while (static_cast<int>(squares.size()) < count)
  {
    SquarePlacement s;
    s.side = 0.1 + 0.3 * unit(rng);
    s.angle = 2.0 * pi * unit(rng);
    s.center = Point2(unit(rng), unit(rng));
    const Eigen::Rotation2Dd R(s.angle);
    bool ok = true;
    for (double sx : {-0.5, 0.5})
      for (double sy : {-0.5, 0.5})
      {
        const Point2 corner = s.center + R * Point2(sx * s.side, sy * s.side);
        ok = ok && corner.x() > margin && corner.x() < 1.0 - margin && corner.y() > margin
             && corner.y() < 1.0 - margin;
      }
    if (ok)
      squares.push_back(s);
  }
  return squares;
}

Mesh square_mesh(const SquarePlacement& s, int cells_per_unit)
{
  const int m = std::max(2, static_cast<int>(std::ceil(s.side * cells_per_unit)));
  const double r = 0.5 * s.side;
  return transform_mesh(rect_mesh(-r, -r, r, r, m, m), s.center, s.angle, Point2::Zero());
}

RateReport run_convergence(const StudyConfig& cfg)
{
  const int p = cfg.p;
  PoissonProblem problem;
  problem.f = exact_rhs;
  problem.beta0 = cfg.beta0.value_or(6.0 * p * p);
  problem.beta1 = cfg.beta1.value_or(10.0);

  const auto squares = random_squares(cfg.N, cfg.seed);
  RateReport report{cfg.N, p, {}, 0.0, 0.0};
  for (int level = 0; level < cfg.levels; ++level)
  {
    const int n = cfg.coarse << level;
    std::vector<Mesh> parts{unit_square_mesh(n, n)};
    for (const auto& s : squares)
      parts.push_back(square_mesh(s, n));

    auto mm = std::make_shared<const MultiMesh>(std::move(parts), 2 * p);
    auto space = build_space(mm, p);
    const AssembledSystem system = assemble_poisson(*space, problem);
    write_dumps(cfg, *mm, &system.A, "level" + std::to_string(level));
    SolveReport sr;
    MultiMeshFunction uh = [&] {
      try
      {
        return solve(system, space, study_rtol, &sr);
      }
      catch (const std::exception& e)
      {
        std::ostringstream msg;
        msg << "convergence study failed at level " << level << " (N=" << cfg.N << ", p=" << p
            << ", seed=" << cfg.seed << ", ndof=" << space->num_dofs() << "): " << e.what();
        throw std::runtime_error(msg.str());
      }
    }();
    const ErrorNorms err = error_norms(uh, exact_solution, exact_gradient, 2 * p + 2);
    report.levels.push_back({level, max_h(*mm), space->num_dofs(), err.l2, err.h1,
                             sr.iterations, fully_covered_parts(*mm)});
  }

  std::vector<double> h, l2, h1;
  for (const auto& r : report.levels)
  {
    h.push_back(r.h);
    l2.push_back(r.err_l2);
    h1.push_back(r.err_h1);
  }
  report.rate_l2 = fit_loglog_slope(h, l2);
  report.rate_h1 = fit_loglog_slope(h, h1);
  return report;
}

std::vector<Mesh> thin_parts(int N, double offset_scale, int cells_per_unit)
{
  const int m = cells_per_unit;
  std::vector<Mesh> parts{rect_mesh(-0.25, -0.25, 1.25, 1.25, (3 * m + 1) / 2, (3 * m + 1) / 2)};
  if (N >= 1)
    parts.push_back(rect_mesh(0.0, 0.0, 1.0, 1.0, m, m));
  for (int i = 2; i <= N; ++i)
  {
    const double a = i * pi / (10.0 * N);
    const double w = 1.0 - 2.0 * a;
    const double x0 = offset_scale * a;
    const int cells = std::max(2, static_cast<int>(std::lround(w * m)));
    parts.push_back(rect_mesh(x0, a, x0 + w, 1.0 - a, cells, cells));
  }
  return parts;
}

namespace
{

struct ThinSolve
{
  ErrorNorms err;
  double h;
  double kappa;
  int cg_iterations;
};

ThinSolve thin_solve(const StudyConfig& cfg, double offset_scale, int cells_per_unit,
                     bool with_errors, const std::string& tag)
{
  PoissonProblem problem;
  problem.f = exact_rhs;
  problem.beta0 = cfg.beta0.value_or(10.0);
  problem.beta1 = cfg.beta1.value_or(5.0);

  auto mm = std::make_shared<const MultiMesh>(thin_parts(cfg.N, offset_scale, cells_per_unit), 2);
  auto space = build_space(mm, 1);
  const AssembledSystem system = assemble_poisson(*space, problem, exact_solution);
  write_dumps(cfg, *mm, &system.A, tag);
  SolveReport sr;
  const MultiMeshFunction uh = solve(system, space, study_rtol, &sr);
  ThinSolve out{{0.0, 0.0}, max_h(*mm), 0.0, sr.iterations};
  if (with_errors)
    out.err = error_norms(uh, exact_solution, exact_gradient, 4);
  out.kappa = estimate_condition_number(system.A, system.constrained_mask()).kappa;
  return out;
}

} // namespace

std::vector<ThinResult> run_thin_intersection(const StudyConfig& cfg)
{
  std::vector<ThinResult> results;
  for (int k : cfg.ks)
  {
    const double scale = std::ldexp(1.0, -k);
    const double x0 = cfg.N >= 2 ? scale * 2.0 * pi / (10.0 * cfg.N) : 0.0;
    try
    {
      const ThinSolve s = thin_solve(cfg, scale, cfg.coarse, true, "k" + std::to_string(k));
      results.push_back({cfg.N, k, x0, s.err.l2, s.err.h1, s.kappa});
    }
    catch (const std::exception& e)
    {
      throw std::runtime_error("thin-intersection study failed at k=" + std::to_string(k) + ": "
                               + e.what());
    }
  }
  return results;
}

ConditionReport run_condition_scaling(const StudyConfig& cfg)
{
  // x0 is prescribed for the first inner part; the others keep x0_i ∝ a_i.
  const double a2 = cfg.N >= 2 ? 2.0 * pi / (10.0 * cfg.N) : 1.0;
  const double scale = cfg.x0 / a2;
  ConditionReport report;
  for (int level = 0; level < cfg.levels; ++level)
  {
    const ThinSolve s = thin_solve(cfg, scale, cfg.coarse << level, false, "level" + std::to_string(level));
    report.levels.push_back({level, s.h, s.kappa, s.cg_iterations});
  }
  std::vector<double> h, kappa;
  for (const auto& r : report.levels)
  {
    h.push_back(r.h);
    kappa.push_back(r.kappa);
  }
  report.slope = fit_loglog_slope(h, kappa);
  return report;
}

BodyMesh body_mesh(std::span<const Point2> polygon, int subdivisions, double ring_factor)
{
  const int K = static_cast<int>(polygon.size());
  const int n = subdivisions;
  if (K < 3 || n < 1 || !(ring_factor > 1.0))
    throw std::invalid_argument("body_mesh: need >= 3 vertices, >= 1 subdivision, ring > 1");

  Point2 c = Point2::Zero();
  for (const auto& v : polygon)
    c += v;
  c /= K;

  // Level 0 is the center, levels 1..n fill the polygon, n+1..2n the ring.
  auto count = [&](int a) { return a == 0 ? 1 : K * std::min(a, n); };
  std::vector<int> start(2 * n + 2, 0);
  for (int a = 0; a <= 2 * n; ++a)
    start[a + 1] = start[a] + count(a);
  auto id = [&](int a, int b) {
    const int m = count(a);
    return start[a] + ((b % m) + m) % m;
  };

  std::vector<Point2> vertices(start[2 * n + 1]);
  vertices[0] = c;
  for (int a = 1; a <= 2 * n; ++a)
  {
    const int per_side = std::min(a, n);
    const double s = a <= n ? double(a) / n : 1.0 + (ring_factor - 1.0) * double(a - n) / n;
    for (int b = 0; b < count(a); ++b)
    {
      const int k = b / per_side;
      const double t = double(b % per_side) / per_side;
      const Point2 edge = (1.0 - t) * polygon[k] + t * polygon[(k + 1) % K];
      vertices[id(a, b)] = c + s * (edge - c);
    }
  }

  std::vector<CellVertices> cells;
  std::vector<bool> interior;
  auto add = [&](int i, int j, int k, bool inside) {
    if (signed_area(vertices[i], vertices[j], vertices[k]) < 0.0)
      std::swap(j, k);
    cells.push_back({i, j, k});
    interior.push_back(inside);
  };
  for (int k = 0; k < K; ++k)
  {
    for (int a = 0; a < n; ++a)
    {
      for (int b = 0; b <= a; ++b)
        add(id(a, k * a + b), id(a + 1, k * (a + 1) + b), id(a + 1, k * (a + 1) + b + 1), true);
      for (int b = 0; b < a; ++b)
        add(id(a, k * a + b), id(a + 1, k * (a + 1) + b + 1), id(a, k * a + b + 1), true);
    }
    for (int a = n; a < 2 * n; ++a)
      for (int b = 0; b < n; ++b)
      {
        const int q00 = id(a, k * n + b), q01 = id(a, k * n + b + 1);
        const int q10 = id(a + 1, k * n + b), q11 = id(a + 1, k * n + b + 1);
        add(q00, q10, q11, false);
        add(q00, q11, q01, false);
      }
  }
  return {Mesh(std::move(vertices), std::move(cells)), std::move(interior)};
}

std::vector<Point2> RigidBody::world_outline() const
{
  const Eigen::Rotation2Dd R(angle);
  std::vector<Point2> out;
  out.reserve(outline.size());
  for (const auto& v : outline)
    out.push_back(center + R * v);
  return out;
}

Mesh RigidBody::world_mesh() const
{
  return transform_mesh(reference_mesh.mesh, center, angle, Point2::Zero());
}

RigidBody make_body(std::vector<Point2> outline, int subdivisions)
{
  const std::size_t n = outline.size();
  if (n < 3)
    throw std::invalid_argument("body outline needs at least 3 vertices");
  for (std::size_t k = 0; k < n; ++k)
    if (orient2d(outline[k], outline[(k + 1) % n], outline[(k + 2) % n]) <= 0)
      throw std::invalid_argument("body outline must be strictly convex and counter-clockwise");

  // Area and centroid from a fan about vertex 0.
  double A = 0.0;
  Point2 c = Point2::Zero();
  for (std::size_t k = 1; k + 1 < n; ++k)
  {
    const double a = signed_area(outline[0], outline[k], outline[k + 1]);
    A += a;
    c += a * (outline[0] + outline[k] + outline[k + 1]) / 3.0;
  }
  c /= A;
  for (auto& v : outline)
    v -= c;

  // Polar moment about the centroid: Σ area (|u|² + u·v + |v|²) / 6 over
  // the fan triangles (0, u, v).
  double J = 0.0;
  for (std::size_t k = 0; k < n; ++k)
  {
    const Point2& u = outline[k];
    const Point2& v = outline[(k + 1) % n];
    J += 0.5 * cross(u, v) * (u.squaredNorm() + u.dot(v) + v.squaredNorm()) / 6.0;
  }

  RigidBody body;
  body.outline = std::move(outline);
  body.reference_mesh = body_mesh(body.outline, subdivisions);
  body.mass = A;
  body.inertia = J;
  return body;
}

ElectroFields solve_electrostatics(const ElectroSetup& setup, std::span<const RigidBody> bodies)
{
  const double L = setup.background;
  std::vector<Mesh> parts{
      rect_mesh(-L, -L, L, L, setup.background_cells, setup.background_cells)};
  std::vector<std::vector<Point2>> outlines;
  for (const auto& b : bodies)
  {
    parts.push_back(b.world_mesh());
    outlines.push_back(b.world_outline());
  }

  ElectroFields fields;
  fields.mm = std::make_shared<const MultiMesh>(std::move(parts), 2);
  fields.space = build_space(fields.mm, 1);
  const MultiMesh& mm = *fields.mm;

  PoissonProblem problem;
  problem.beta0 = setup.beta0;
  problem.beta1 = setup.beta1;
  problem.stabilization = StabilizationKind::value_jump_h2;
  problem.f = [&](const Point2& x) {
    for (std::size_t b = 0; b < bodies.size(); ++b)
      if (inside_convex(outlines[b], x))
        return bodies[b].charge_density;
    return 0.0;
  };
  fields.phi = solve(assemble_poisson(*fields.space, problem), fields.space, study_rtol);
  fields.ex = solve(assemble_projection(*fields.space, *fields.phi, 0, setup.beta0, setup.beta1),
                    fields.space, study_rtol);
  fields.ey = solve(assemble_projection(*fields.space, *fields.phi, 1, setup.beta0, setup.beta1),
                    fields.space, study_rtol);

  for (const auto& e : mm.interfaces())
    for (const auto& x : e.rule.rule.points)
      fields.max_interface_jump =
          std::max(fields.max_interface_jump, std::abs(fields.phi->eval_on_cell(e.i, e.cell_i, x)
                                                       - fields.phi->eval_on_cell(e.j, e.cell_j, x)));

  // F_D = ∫_D E and T_D = ∫_D (x - x̄) × E, summed over the visible parts.
  // On the body's own mesh D is given by the interior markers.
  fields.loads.assign(bodies.size(), BodyLoad{Point2::Zero(), 0.0});
  for (int part = 0; part < mm.num_parts(); ++part)
    for (int c = 0; c < static_cast<int>(mm.part(part).num_cells()); ++c)
    {
      if (!mm.is_active(part, c))
        continue;
      const QuadratureRule rule = mm.visible_rule(part, c);
      for (std::size_t b = 0; b < bodies.size(); ++b)
      {
        const bool own = part == static_cast<int>(b) + 1;
        if (own && !bodies[b].reference_mesh.interior[c])
          continue;
        for (std::size_t q = 0; q < rule.size(); ++q)
        {
          const Point2& x = rule.points[q];
          if (!own && !inside_convex(outlines[b], x))
            continue;
          const Point2 E(fields.ex->eval_on_cell(part, c, x), fields.ey->eval_on_cell(part, c, x));
          fields.loads[b].force += rule.weights[q] * E;
          fields.loads[b].torque += rule.weights[q] * cross<double>(x - bodies[b].center, E);
        }
      }
    }
  return fields;
}

void advance_bodies(std::span<RigidBody> bodies, std::span<const BodyLoad> loads, double dt,
                    double box)
{
  for (std::size_t b = 0; b < bodies.size(); ++b)
  {
    RigidBody& body = bodies[b];
    body.velocity += dt * loads[b].force / body.mass;
    body.angular_velocity += dt * loads[b].torque / body.inertia;
    body.center += dt * body.velocity;
    body.angle += dt * body.angular_velocity;

    Point2 lo = Point2::Constant(std::numeric_limits<double>::infinity());
    Point2 hi = -lo;
    for (const auto& v : body.world_outline())
    {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    for (int d = 0; d < 2; ++d)
    {
      if ((hi[d] > box && body.velocity[d] > 0.0) || (lo[d] < -box && body.velocity[d] < 0.0))
      {
        body.velocity[d] = -body.velocity[d];
        body.angular_velocity = -body.angular_velocity;
      }
    }
  }
}

std::vector<RigidBody> default_bodies(int subdivisions)
{
  auto regular = [](int n, double r, double phase) {
    std::vector<Point2> v;
    for (int k = 0; k < n; ++k)
      v.emplace_back(r * std::cos(phase + 2 * pi * k / n), r * std::sin(phase + 2 * pi * k / n));
    return v;
  };
  std::vector<RigidBody> bodies{make_body(regular(3, 0.25, pi / 2), subdivisions),
                                make_body(regular(4, 0.22, pi / 4), subdivisions),
                                make_body(regular(5, 0.22, 0.0), subdivisions)};
  bodies[0].center = Point2(-0.45, -0.3);
  bodies[1].center = Point2(0.4, -0.25);
  bodies[1].angle = 0.3;
  bodies[2].center = Point2(0.0, 0.45);
  bodies[2].angle = 0.7;
  return bodies;
}

ElectroReport run_electrostatics(const StudyConfig& cfg)
{
  ElectroSetup setup;
  setup.background_cells = cfg.background_cells;
  setup.beta0 = cfg.beta0.value_or(10.0);
  setup.beta1 = cfg.beta1.value_or(1.0);

  std::vector<RigidBody> bodies = default_bodies(cfg.body_cells);
  ElectroReport report;
  for (int step = 0; step < cfg.steps; ++step)
  {
    const double t = step * cfg.dt;
    try
    {
      const ElectroFields fields = solve_electrostatics(setup, bodies);
      if (step == 0)
        write_dumps(cfg, *fields.mm, nullptr, "step0");
      if (!cfg.out_dir.empty() && cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0)
      {
        const std::string suffix = "_" + std::to_string(step) + ".csv";
        auto phi = open_output(cfg.out_dir, "phi" + suffix);
        io::write_function_snapshot(phi, *fields.phi);
        auto ex = open_output(cfg.out_dir, "ex" + suffix);
        io::write_function_snapshot(ex, *fields.ex);
        auto ey = open_output(cfg.out_dir, "ey" + suffix);
        io::write_function_snapshot(ey, *fields.ey);
      }
      advance_bodies(bodies, fields.loads, cfg.dt, setup.box);
      for (std::size_t b = 0; b < bodies.size(); ++b)
      {
        const RigidBody& body = bodies[b];
        report.trajectory.push_back({step, t + cfg.dt, static_cast<int>(b), body.center,
                                     body.velocity, body.angular_velocity, body.angle,
                                     fields.loads[b].force, fields.loads[b].torque});
      }
    }
    catch (const std::exception& e)
    {
      nlohmann::json dump;
      dump["step"] = step;
      dump["error"] = e.what();
      for (const auto& body : bodies)
        dump["bodies"].push_back({{"center", {body.center.x(), body.center.y()}},
                                  {"angle", body.angle},
                                  {"velocity", {body.velocity.x(), body.velocity.y()}},
                                  {"omega", body.angular_velocity}});
      if (!cfg.out_dir.empty())
        open_output(cfg.out_dir, "failure.json") << dump.dump(2) << "\n";
      throw std::runtime_error("electrostatics failed at step " + std::to_string(step) + ": "
                               + e.what() + "; poses " + dump["bodies"].dump());
    }
  }
  for (const auto& body : bodies)
    report.all_inside_box = report.all_inside_box && std::abs(body.center.x()) < setup.box
                            && std::abs(body.center.y()) < setup.box;
  report.final_bodies = std::move(bodies);
  return report;
}

void run_study(const StudyConfig& cfg)
{
  if (cfg.out_dir.empty())
    throw std::invalid_argument("output directory required");
  nlohmann::json meta;
  meta["config"] = config_to_json(cfg);

  switch (cfg.kind)
  {
  case StudyKind::convergence:
  {
    const RateReport r = run_convergence(cfg);
    auto out = open_output(cfg.out_dir, "convergence.csv");
    out << "N,p,level,h,ndof,err_l2,err_h1\n";
    for (const auto& l : r.levels)
      out << r.N << ',' << r.p << ',' << l.level << ',' << l.h << ',' << l.ndof << ','
          << l.err_l2 << ',' << l.err_h1 << '\n';
    meta["rate_l2"] = r.rate_l2;
    meta["rate_h1"] = r.rate_h1;
    for (const auto& l : r.levels)
      meta["covered_parts"].push_back(l.covered_parts);
    break;
  }
  case StudyKind::thin:
  {
    auto out = open_output(cfg.out_dir, "thin.csv");
    out << "N,k,x0,err_l2,err_h1,kappa\n";
    for (const auto& r : run_thin_intersection(cfg))
      out << r.N << ',' << r.k << ',' << r.x0 << ',' << r.err_l2 << ',' << r.err_h1 << ','
          << r.kappa << '\n';
    break;
  }
  case StudyKind::condition_scaling:
  {
    const ConditionReport r = run_condition_scaling(cfg);
    auto out = open_output(cfg.out_dir, "condscale.csv");
    out << "level,h,kappa,cg_iters\n";
    for (const auto& l : r.levels)
      out << l.level << ',' << l.h << ',' << l.kappa << ',' << l.cg_iterations << '\n';
    meta["slope"] = r.slope;
    break;
  }
  case StudyKind::electrostatics:
  {
    const ElectroReport r = run_electrostatics(cfg);
    auto out = open_output(cfg.out_dir, "trajectory.csv");
    out << "step,t,body,cx,cy,vx,vy,omega,theta,Fx,Fy,T\n";
    for (const auto& row : r.trajectory)
      out << row.step << ',' << row.t << ',' << row.body << ',' << row.center.x() << ','
          << row.center.y() << ',' << row.velocity.x() << ',' << row.velocity.y() << ','
          << row.omega << ',' << row.theta << ',' << row.force.x() << ',' << row.force.y() << ','
          << row.torque << '\n';
    meta["all_inside_box"] = r.all_inside_box;
    break;
  }
  }
  meta["desk_scale"] = "N <= 4, p <= 2, uniform refinement, 50 electrostatics steps";
  open_output(cfg.out_dir, "metadata.json") << meta.dump(2) << "\n";
}

} // namespace mmfem
