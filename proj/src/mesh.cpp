#include "mmfem/mesh.hpp"
#include "mmfem/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace mmfem
{

Mesh::Mesh(std::vector<Point2> vertices, std::vector<CellVertices> cells)
  : _vertices(std::move(vertices)), _cells(std::move(cells))
{
  for (const auto& v : _vertices)
    if (!std::isfinite(v.x()) || !std::isfinite(v.y()))
      throw std::invalid_argument("Mesh: non-finite vertex coordinate");

  const int nv = static_cast<int>(_vertices.size());
  std::map<std::pair<int, int>, std::pair<int, int>> edge_use; // edge -> (count, facet)
  for (std::size_t c = 0; c < _cells.size(); ++c)
  {
    const auto& cell = _cells[c];
    for (int v : cell)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("Mesh: cell " + std::to_string(c)
                                    + " references vertex out of range");
    if (orient2d(_vertices[cell[0]], _vertices[cell[1]], _vertices[cell[2]]) <= 0)
      throw std::invalid_argument("Mesh: cell " + std::to_string(c)
                                  + " is not counter-clockwise");
    for (int e = 0; e < 3; ++e)
    {
      const auto lv = edge_local_vertices(e);
      const int a = cell[lv[0]];
      const int b = cell[lv[1]];
      auto [it, inserted] = edge_use.try_emplace(
        std::minmax(a, b), std::pair<int, int>{0, static_cast<int>(3 * c + e)});
      it->second.first += 1;
    }
  }

  for (const auto& [edge, use] : edge_use)
    if (use.first == 1)
      _boundary_facets.push_back({use.second / 3, use.second % 3});
  std::sort(_boundary_facets.begin(), _boundary_facets.end(),
            [](const Facet& a, const Facet& b) {
              return std::pair(a.cell, a.local_edge) < std::pair(b.cell, b.local_edge);
            });
}

Triangle Mesh::cell_triangle(std::size_t c) const
{
  const auto& cell = _cells[c];
  return {_vertices[cell[0]], _vertices[cell[1]], _vertices[cell[2]]};
}

double Mesh::cell_area(std::size_t c) const
{
  return signed_area(cell_triangle(c));
}

Segment Mesh::facet_segment(const Facet& f) const
{
  const auto lv = edge_local_vertices(f.local_edge);
  const auto& cell = _cells[f.cell];
  return {_vertices[cell[lv[0]]], _vertices[cell[lv[1]]]};
}

Point2 Mesh::facet_normal(const Facet& f) const
{
  // Counter-clockwise cells have the interior on the left of each edge.
  const auto s = facet_segment(f);
  const Point2 d = s[1] - s[0];
  return Point2(d.y(), -d.x()).normalized();
}

double Mesh::total_area() const
{
  double sum = 0.0;
  for (std::size_t c = 0; c < _cells.size(); ++c)
    sum += cell_area(c);
  return sum;
}

Mesh unit_square_mesh(int nx, int ny)
{
  return rect_mesh(0.0, 0.0, 1.0, 1.0, nx, ny);
}

Mesh rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny)
{
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("rect_mesh: cell counts must be positive");
  if (!(x1 > x0) || !(y1 > y0))
    throw std::invalid_argument("rect_mesh: degenerate rectangle");

  std::vector<Point2> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
  {
    // Endpoints are hit exactly so that neighbouring meshes can share lines.
    const double y = j == ny ? y1 : y0 + (y1 - y0) * j / ny;
    for (int i = 0; i <= nx; ++i)
    {
      const double x = i == nx ? x1 : x0 + (x1 - x0) * i / nx;
      vertices.emplace_back(x, y);
    }
  }

  std::vector<CellVertices> cells;
  cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
    {
      const int v00 = j * (nx + 1) + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + nx + 1;
      const int v11 = v01 + 1;
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }
  return Mesh(std::move(vertices), std::move(cells));
}

Mesh transform_mesh(const Mesh& m, const Point2& translation, double angle,
                    const Point2& pivot)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix2d rotation;
  rotation << c, -s, s, c;

  std::vector<Point2> vertices;
  vertices.reserve(m.num_vertices());
  for (const auto& v : m.vertices())
    vertices.push_back(pivot + rotation * (v - pivot) + translation);
  return Mesh(std::move(vertices), m.cells());
}

MeshQuality mesh_quality(const Mesh& m)
{
  if (m.empty())
    throw std::invalid_argument("mesh_quality: empty mesh");

  MeshQuality q{0.0, 0.0, 0.0};
  double amin = std::numeric_limits<double>::max();
  double amax = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c)
  {
    const auto t = m.cell_triangle(c);
    const double a = area(t);
    const double d = diameter(t);
    q.h = std::max(q.h, d);
    q.c0 = std::max(q.c0, d * d / a);
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  q.c1 = amax / amin;
  return q;
}

} // namespace mmfem
