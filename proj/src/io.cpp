#include "mmfem/io.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace mmfem::io
{

nlohmann::json mesh_to_json(const Mesh& m)
{
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : m.vertices())
    j["vertices"].push_back({v.x(), v.y()});
  j["cells"] = nlohmann::json::array();
  for (const auto& c : m.cells())
    j["cells"].push_back({c[0], c[1], c[2]});
  return j;
}

Mesh mesh_from_json(const nlohmann::json& j)
{
  std::vector<Point2> vertices;
  for (const auto& v : j.at("vertices"))
    vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  std::vector<CellVertices> cells;
  for (const auto& c : j.at("cells"))
    cells.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>()});
  return Mesh(std::move(vertices), std::move(cells));
}

void write_mesh(const Mesh& m, const std::string& path)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_mesh: cannot open " + path);
  out << std::setprecision(17) << mesh_to_json(m).dump() << "\n";
}

Mesh read_mesh(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_mesh: cannot open " + path);
  return mesh_from_json(nlohmann::json::parse(in));
}

void write_rule_csv(std::ostream& out, const QuadratureRule& rule, bool header)
{
  if (header)
    out << "x,y,w\n";
  out << std::setprecision(17);
  for (std::size_t q = 0; q < rule.size(); ++q)
    out << rule.points[q].x() << "," << rule.points[q].y() << "," << rule.weights[q] << "\n";
}

void write_matrix_coordinate(std::ostream& out, const SparseMatrix& A)
{
  out << std::setprecision(17);
  for (int row = 0; row < A.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(A, row); it; ++it)
      out << row << " " << it.col() << " " << it.value() << "\n";
}

nlohmann::json multimesh_diagnostics(const MultiMesh& mm)
{
  const auto stats = multimesh_stats(mm);
  nlohmann::json j;
  j["num_parts"] = mm.num_parts();
  j["parts"] = nlohmann::json::array();
  for (int i = 0; i < mm.num_parts(); ++i)
  {
    const auto& counts = stats.class_counts[i];
    j["parts"].push_back({{"uncut", counts[0]},
                          {"cut", counts[1]},
                          {"covered", counts[2]},
                          {"h", mm.h(i)},
                          {"visible_measure", stats.visible_measure[i]}});
  }
  nlohmann::json delta = nlohmann::json::array();
  for (int i = 0; i < stats.delta.rows(); ++i)
  {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < stats.delta.cols(); ++k)
      row.push_back(stats.delta(i, k));
    delta.push_back(row);
  }
  j["delta"] = delta;
  j["n_overlaps"] = stats.n_overlaps;
  j["eta"] = stats.eta;
  j["total_visible_measure"] = stats.total_visible_measure();
  j["num_interface_pieces"] = mm.interfaces().size();
  j["num_overlap_pieces"] = mm.overlaps().size();
  return j;
}

void write_function_snapshot(std::ostream& out, const MultiMeshFunction& f)
{
  const auto& space = f.space();
  const auto& mm = space.multimesh();
  out << "part,vertex,x,y,value\n" << std::setprecision(17);
  for (int i = 0; i < mm.num_parts(); ++i)
  {
    const auto& vertices = mm.part(i).vertices();
    // Vertex DOFs coincide with vertex indices for both degrees.
    for (std::size_t v = 0; v < vertices.size(); ++v)
      out << i << "," << v << "," << vertices[v].x() << "," << vertices[v].y() << ","
          << f.coefficients()[space.offset(i) + static_cast<int>(v)] << "\n";
  }
}

} // namespace mmfem::io
