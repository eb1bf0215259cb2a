#include "mmfem/multimesh.hpp"
#include "mmfem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mmfem
{
namespace
{

std::string format_point(const Point2& p)
{
  std::ostringstream out;
  out.precision(17);
  out << "(" << p.x() << ", " << p.y() << ")";
  return out.str();
}

double signed_measure(const std::vector<SignedSimplex>& simplices)
{
  double sum = 0.0;
  for (const auto& s : simplices)
    sum += s.sign * area(s.triangle);
  return sum;
}

} // namespace

double MultiMeshStats::total_visible_measure() const
{
  double sum = 0.0;
  for (double m : visible_measure)
    sum += m;
  return sum;
}

MultiMesh::MultiMesh(std::vector<Mesh> parts, int order)
  : _parts(std::move(parts)), _order(order)
{
  if (_parts.empty())
    throw std::invalid_argument("MultiMesh: at least one part is required");
  for (std::size_t i = 0; i < _parts.size(); ++i)
    if (_parts[i].empty())
      throw std::invalid_argument("MultiMesh: part " + std::to_string(i) + " is empty");
  reference_triangle_rule(order); // rejects unsupported orders early

  for (const auto& mesh : _parts)
  {
    _trees.emplace_back(mesh);
    _h.push_back(mesh_quality(mesh).h);
  }
  validate();
  compute_collisions();
  for (int i = 0; i < num_parts(); ++i)
    classify_cells(i);
  for (int i = 1; i < num_parts(); ++i)
    compute_interfaces(i);
  for (int i = 0; i + 1 < num_parts(); ++i)
    compute_overlaps(i);
  compute_stats();
}

void MultiMesh::validate() const
{
  // Remark: higher parts must stay strictly inside the background.
  const Mesh& background = _parts.front();
  std::vector<std::array<bool, 3>> on_boundary(background.num_cells(), {false, false, false});
  for (const auto& f : background.boundary_facets())
    on_boundary[f.cell][f.local_edge] = true;

  for (int k = 1; k < num_parts(); ++k)
  {
    const auto& vertices = _parts[k].vertices();
    for (std::size_t v = 0; v < vertices.size(); ++v)
    {
      const Point2& x = vertices[v];
      const auto cells = tree_point_query(_trees.front(), background, x);
      bool strict = !cells.empty();
      for (int c : cells)
        for (int e = 0; e < 3 && strict; ++e)
        {
          if (!on_boundary[c][e])
            continue;
          const auto s = background.facet_segment({c, e});
          if (orient2d(s[0], s[1], x) == 0)
            strict = false;
        }
      if (!strict)
        throw std::invalid_argument("MultiMesh: vertex " + std::to_string(v) + " "
                                    + format_point(x) + " of part " + std::to_string(k)
                                    + " is not strictly inside part 0");
    }
  }
}

void MultiMesh::compute_collisions()
{
  const int n = num_parts();
  _collisions.resize(n);
  for (int i = 0; i < n; ++i)
    _collisions[i].assign(_parts[i].num_cells(), {});

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (const auto& [a, b] : tree_collide(_trees[i], _trees[j]))
      {
        const Triangle ta = _parts[i].cell_triangle(a);
        const Triangle tb = _parts[j].cell_triangle(b);
        const double min_area = prune_area_fraction * std::min(area(ta), area(tb));
        if (triangle_triangle_intersection(ta, tb).area() > min_area)
          _collisions[i][a].push_back({j, b});
      }
}

void MultiMesh::classify_cells(int part)
{
  const Mesh& mesh = _parts[part];
  const std::size_t n = mesh.num_cells();
  _classes.emplace_back(n, CellClass::uncut);
  _cut_simplices.emplace_back(n);
  _cut_rules.emplace_back(n);
  _visible_mass.emplace_back(n, 0.0);

  std::vector<Triangle> cutters;
  for (std::size_t c = 0; c < n; ++c)
  {
    const Triangle K = mesh.cell_triangle(c);
    const double cell_area = area(K);
    const auto& hits = _collisions[part][c];
    if (hits.empty())
    {
      _visible_mass[part][c] = cell_area;
      continue;
    }

    cutters.clear();
    for (const auto& ref : hits)
      cutters.push_back(_parts[ref.part].cell_triangle(ref.cell));
    auto simplices = inclusion_exclusion({K}, cutters, prune_area_fraction * cell_area);
    const double mass = signed_measure(simplices);
    _cut_simplices[part][c] = std::move(simplices);
    if (mass < covered_fraction * cell_area)
    {
      _classes[part][c] = CellClass::covered;
      continue;
    }
    _classes[part][c] = CellClass::cut;
    _visible_mass[part][c] = mass;
    _cut_rules[part][c] = rule_from_simplices(_cut_simplices[part][c], _order);
  }
}

void MultiMesh::promote(int part, int cell)
{
  // A cell touched by a visible interface intersects its visible domain even
  // when the visible sliver is below the mass threshold.
  if (_classes[part][cell] != CellClass::covered)
    return;
  _classes[part][cell] = CellClass::cut;
  _visible_mass[part][cell] = std::max(0.0, signed_measure(_cut_simplices[part][cell]));
  _cut_rules[part][cell] = rule_from_simplices(_cut_simplices[part][cell], _order);
}

std::vector<int> MultiMesh::containing_cells(int part, const Point2& x) const
{
  auto cells = tree_point_query(_trees[part], _parts[part], x);
  std::stable_partition(cells.begin(), cells.end(),
                        [&](int c) { return is_active(part, c); });
  return cells;
}

void MultiMesh::compute_interfaces(int i)
{
  const Mesh& mesh = _parts[i];
  const double min_length = min_interface_fraction * _h[i];

  for (const Facet& facet : mesh.boundary_facets())
  {
    const Segment seg = mesh.facet_segment(facet);
    const Point2 direction = seg[1] - seg[0];
    const double length = direction.norm();
    const AABB box = AABB::of(seg);

    std::vector<Interval> hidden;
    for (int k = i + 1; k < num_parts(); ++k)
      for (int c : _trees[k].box_query(box))
        if (auto iv = clip_segment_against_triangle(seg, _parts[k].cell_triangle(c));
            iv && iv->length() > 0.0)
          hidden.push_back(*iv);
    const auto visible = interval_subtract({{0.0, 1.0}}, hidden);
    if (visible.empty())
      continue;

    // Crossings with lower cell boundaries split the facet into pieces that
    // each lie in a single lower cell.
    std::vector<double> crossings;
    for (int j = 0; j < i; ++j)
      for (int c : _trees[j].box_query(box))
        if (auto iv = clip_segment_against_triangle(seg, _parts[j].cell_triangle(c)))
        {
          crossings.push_back(iv->t0);
          crossings.push_back(iv->t1);
        }

    for (const auto& piece : visible)
    {
      std::vector<double> breaks{piece.t0, piece.t1};
      for (double t : crossings)
        if (t > piece.t0 && t < piece.t1)
          breaks.push_back(t);
      std::sort(breaks.begin(), breaks.end());
      breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

      for (std::size_t b = 0; b + 1 < breaks.size(); ++b)
      {
        if ((breaks[b + 1] - breaks[b]) * length < min_length)
          continue;
        const Point2 a = seg[0] + breaks[b] * direction;
        const Point2 e = seg[0] + breaks[b + 1] * direction;
        const Point2 mid = 0.5 * (a + e);

        int owner = -1;
        int owner_cell = -1;
        for (int j = i - 1; j >= 0 && owner < 0; --j)
        {
          const auto cells = containing_cells(j, mid);
          if (!cells.empty())
          {
            owner = j;
            owner_cell = cells.front();
          }
        }
        if (owner < 0)
          throw std::runtime_error("MultiMesh: interface piece of part " + std::to_string(i)
                                   + " at " + format_point(mid)
                                   + " lies in no lower part");

        promote(i, facet.cell);
        promote(owner, owner_cell);

        InterfaceEntry entry{i, owner, facet, facet.cell, owner_cell, {a, e}, {}};
        entry.rule.rule = gauss_segment_rule(_order, a, e);
        entry.rule.normal = mesh.facet_normal(facet);
        entry.rule.segment = {a, e};
        _interfaces.push_back(std::move(entry));
      }
    }
  }
}

void MultiMesh::compute_overlaps(int i)
{
  const Mesh& mesh = _parts[i];
  std::vector<Triangle> higher;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
  {
    if (!is_active(i, static_cast<int>(c)))
      continue;
    const Triangle K = mesh.cell_triangle(c);
    const double min_mass = prune_area_fraction * area(K);
    const auto& hits = _collisions[i][c];
    for (std::size_t h = 0; h < hits.size(); ++h)
    {
      const int j = hits[h].part;
      higher.clear();
      for (std::size_t k = h + 1; k < hits.size(); ++k)
        if (hits[k].part > j)
          higher.push_back(_parts[hits[k].part].cell_triangle(hits[k].cell));

      const Triangle C = _parts[j].cell_triangle(hits[h].cell);
      auto rule = overlap_rule(K, C, higher, _order);
      if (rule.mass() > min_mass)
        _overlaps.push_back({i, j, static_cast<int>(c), hits[h].cell, std::move(rule)});
    }
  }
}

void MultiMesh::compute_stats()
{
  const int n = num_parts();
  _delta = Eigen::MatrixXi::Zero(n, n);
  for (const auto& o : _overlaps)
    _delta(o.i, o.j) = 1;

  _n_overlaps = 0;
  for (int j = 1; j < n; ++j)
    _n_overlaps = std::max(_n_overlaps, _delta.col(j).head(j).sum());

  _eta = 1.0;
  for (int i = 0; i < n; ++i)
    for (std::size_t c = 0; c < _parts[i].num_cells(); ++c)
      if (_classes[i][c] == CellClass::cut && _visible_mass[i][c] > 0.0)
        _eta = std::min(_eta, _visible_mass[i][c] / _parts[i].cell_area(c));
}

QuadratureRule MultiMesh::visible_rule(int part, int cell, int order) const
{
  switch (_classes[part][cell])
  {
  case CellClass::uncut:
    return map_rule_to_triangle(reference_triangle_rule(order), _parts[part].cell_triangle(cell));
  case CellClass::cut:
    if (order == _order)
      return _cut_rules[part][cell];
    return rule_from_simplices(_cut_simplices[part][cell], order);
  case CellClass::covered:
    break;
  }
  return {};
}

std::optional<CellRef> MultiMesh::locate_point(const Point2& x) const
{
  for (int i = num_parts() - 1; i >= 0; --i)
  {
    const auto cells = containing_cells(i, x);
    if (!cells.empty())
      return CellRef{i, cells.front()};
  }
  return std::nullopt;
}

MultiMeshStats multimesh_stats(const MultiMesh& mm)
{
  MultiMeshStats stats{mm.delta(), mm.n_overlaps(), mm.eta(), {}, {}};
  for (int i = 0; i < mm.num_parts(); ++i)
  {
    const Mesh& mesh = mm.part(i);
    double measure = 0.0;
    std::array<int, 3> counts{0, 0, 0};
    for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    {
      const int cell = static_cast<int>(c);
      switch (mm.cell_class(i, cell))
      {
      case CellClass::uncut:
        measure += mesh.cell_area(c);
        counts[0]++;
        break;
      case CellClass::cut:
        measure += mm.cut_rule(i, cell).mass();
        counts[1]++;
        break;
      case CellClass::covered:
        counts[2]++;
        break;
      }
    }
    stats.visible_measure.push_back(measure);
    stats.class_counts.push_back(counts);
  }
  return stats;
}

} // namespace mmfem
