#pragma once

#include "mmfem/aabb_tree.hpp"
#include "mmfem/mesh.hpp"
#include "mmfem/quadrature.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace mmfem
{

enum class CellClass
{
  uncut,
  cut,
  covered
};

struct CellRef
{
  int part;
  int cell;

  friend bool operator==(const CellRef&, const CellRef&) = default;
  friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

/// Piece of the overlap O_ij carried by one cell pair, i < j.
struct OverlapEntry
{
  int i;
  int j;
  int cell_i;
  int cell_j;
  QuadratureRule rule;
};

/// Piece of the interface Γ_ij, j < i: a sub-segment of a boundary facet of
/// part i lying in cell_j of part j. The rule normal points out of part i.
struct InterfaceEntry
{
  int i;
  int j;
  Facet facet;
  int cell_i;
  int cell_j;
  Segment segment;
  InterfaceRule rule;
};

struct MultiMeshStats
{
  Eigen::MatrixXi delta;
  int n_overlaps;
  double eta;
  std::vector<double> visible_measure;
  std::vector<std::array<int, 3>> class_counts; // uncut, cut, covered per part
  double total_visible_measure() const;
};

/// Relative visible mass below which a cell counts as hidden.
inline constexpr double covered_fraction = 1e-12;
/// Interface pieces shorter than this fraction of h_i are dropped.
inline constexpr double min_interface_fraction = 1e-13;

/// Ordered stack of premeshes (part 0 is the background) together with all
/// cut information the multimesh discretization needs. Immutable once built.
class MultiMesh
{
public:
  /// Throws std::invalid_argument if a vertex of a higher part is not
  /// strictly inside part 0, and std::runtime_error if interface pieces
  /// cannot be attributed to a lower part.
  MultiMesh(std::vector<Mesh> parts, int order);

  int num_parts() const { return static_cast<int>(_parts.size()); }
  const Mesh& part(int i) const { return _parts[i]; }
  const AABBTree& tree(int i) const { return _trees[i]; }
  int order() const { return _order; }

  /// Largest cell diameter of part i.
  double h(int i) const { return _h[i]; }

  CellClass cell_class(int part, int cell) const { return _classes[part][cell]; }
  const std::vector<CellClass>& classes(int part) const { return _classes[part]; }
  bool is_active(int part, int cell) const { return _classes[part][cell] != CellClass::covered; }

  /// Cells of higher parts whose intersection with the cell has positive area.
  const std::vector<CellRef>& higher_collisions(int part, int cell) const
  {
    return _collisions[part][cell];
  }

  /// Signed rule on the visible part of a CUT cell (empty otherwise).
  const QuadratureRule& cut_rule(int part, int cell) const { return _cut_rules[part][cell]; }
  const std::vector<SignedSimplex>& cut_simplices(int part, int cell) const
  {
    return _cut_simplices[part][cell];
  }

  /// Rule on the visible part of any cell at any order: the plain mapped
  /// rule for UNCUT cells, the signed rule for CUT cells, empty if COVERED.
  QuadratureRule visible_rule(int part, int cell, int order) const;
  QuadratureRule visible_rule(int part, int cell) const { return visible_rule(part, cell, _order); }

  const std::vector<OverlapEntry>& overlaps() const { return _overlaps; }
  const std::vector<InterfaceEntry>& interfaces() const { return _interfaces; }

  const Eigen::MatrixXi& delta() const { return _delta; }
  int n_overlaps() const { return _n_overlaps; }
  double eta() const { return _eta; }

  /// Topmost part whose premesh contains x, with a containing cell
  /// (an active one when there is a choice).
  std::optional<CellRef> locate_point(const Point2& x) const;

  /// Cells of part i containing x, active ones first.
  std::vector<int> containing_cells(int part, const Point2& x) const;

private:
  void validate() const;
  void compute_collisions();
  void classify_cells(int part);
  void compute_interfaces(int part);
  void compute_overlaps(int i);
  void compute_stats();
  void promote(int part, int cell);

  std::vector<Mesh> _parts;
  std::vector<AABBTree> _trees;
  std::vector<double> _h;
  int _order;

  std::vector<std::vector<std::vector<CellRef>>> _collisions;
  std::vector<std::vector<CellClass>> _classes;
  std::vector<std::vector<std::vector<SignedSimplex>>> _cut_simplices;
  std::vector<std::vector<QuadratureRule>> _cut_rules;
  std::vector<std::vector<double>> _visible_mass;

  std::vector<OverlapEntry> _overlaps;
  std::vector<InterfaceEntry> _interfaces;

  Eigen::MatrixXi _delta;
  int _n_overlaps = 0;
  double _eta = 1.0;
};

inline MultiMesh build_multimesh(std::vector<Mesh> parts, int order)
{
  return MultiMesh(std::move(parts), order);
}

MultiMeshStats multimesh_stats(const MultiMesh& mm);

} // namespace mmfem
