#pragma once

#include "mmfem/point.hpp"

#include <array>
#include <vector>

namespace mmfem
{

using CellVertices = std::array<int, 3>;

/// Edge `local_edge` of `cell` is the edge opposite vertex `local_edge`.
struct Facet
{
  int cell;
  int local_edge;

  friend bool operator==(const Facet&, const Facet&) = default;
};

/// Conforming triangular premesh. Cells are stored counter-clockwise and the
/// boundary facets are derived from the connectivity on construction.
class Mesh
{
public:
  Mesh() = default;

  /// Throws std::invalid_argument on out-of-range indices, non-finite
  /// coordinates or cells with non-positive orientation.
  Mesh(std::vector<Point2> vertices, std::vector<CellVertices> cells);

  const std::vector<Point2>& vertices() const { return _vertices; }
  const std::vector<CellVertices>& cells() const { return _cells; }
  const std::vector<Facet>& boundary_facets() const { return _boundary_facets; }

  std::size_t num_vertices() const { return _vertices.size(); }
  std::size_t num_cells() const { return _cells.size(); }
  bool empty() const { return _cells.empty(); }

  Triangle cell_triangle(std::size_t c) const;
  double cell_area(std::size_t c) const;

  /// Local vertex indices (into the cell) of the two endpoints of an edge.
  static std::array<int, 2> edge_local_vertices(int local_edge)
  {
    return {(local_edge + 1) % 3, (local_edge + 2) % 3};
  }

  Segment facet_segment(const Facet& f) const;

  /// Unit outward normal of a boundary facet.
  Point2 facet_normal(const Facet& f) const;

  double total_area() const;

private:
  std::vector<Point2> _vertices;
  std::vector<CellVertices> _cells;
  std::vector<Facet> _boundary_facets;
};

struct MeshQuality
{
  double h;  // max cell diameter
  double c0; // max diam^2 / area
  double c1; // max area / min area
};

Mesh unit_square_mesh(int nx, int ny);

/// Structured mesh of [x0,x1] x [y0,y1]; each rectangle is split along its
/// lower-left to upper-right diagonal.
Mesh rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny);

/// Rotates every vertex by `angle` about `pivot`, then translates.
Mesh transform_mesh(const Mesh& m, const Point2& translation, double angle,
                    const Point2& pivot);

MeshQuality mesh_quality(const Mesh& m);

} // namespace mmfem
