#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "autorig/common.hpp"

namespace autorig {

using Triangle = std::array<int, 3>;

/// Indexed triangle mesh. Construct through make_mesh() or load_mesh() so the
/// invariants (valid indices, no degenerate triangles, cached watertightness)
/// hold.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::string name;
  bool watertight = false;
};

/// Validates topology and computes the watertight flag. Throws kIndexRange or
/// kTopology on invalid input.
TriangleMesh make_mesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                       std::string name = {});

/// True iff every undirected edge is used by exactly two triangles.
bool is_watertight(const std::vector<Triangle>& triangles);

TriangleMesh read_obj(std::istream& in, const std::string& name = {});
TriangleMesh load_mesh(const std::string& path);

void write_obj(const TriangleMesh& mesh, std::ostream& out);
void write_mesh(const TriangleMesh& mesh, const std::string& path);

}  // namespace autorig
