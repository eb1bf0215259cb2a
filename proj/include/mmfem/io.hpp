#pragma once

#include "mmfem/assembly.hpp"
#include "mmfem/fespace.hpp"
#include "mmfem/mesh.hpp"
#include "mmfem/multimesh.hpp"
#include "mmfem/quadrature.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace mmfem::io
{

/// {"vertices": [[x,y],...], "cells": [[i,j,k],...]}
nlohmann::json mesh_to_json(const Mesh& m);
Mesh mesh_from_json(const nlohmann::json& j);
void write_mesh(const Mesh& m, const std::string& path);
Mesh read_mesh(const std::string& path);

/// CSV rows `x,y,w`.
void write_rule_csv(std::ostream& out, const QuadratureRule& rule, bool header = true);

/// Coordinate text format, one `row col value` per stored entry.
void write_matrix_coordinate(std::ostream& out, const SparseMatrix& A);

/// Per-part class counts, δ matrix, N_O, η and visible measures.
nlohmann::json multimesh_diagnostics(const MultiMesh& mm);

/// CSV `part,vertex,x,y,value` with the part-local value at every vertex.
void write_function_snapshot(std::ostream& out, const MultiMeshFunction& f);

} // namespace mmfem::io
