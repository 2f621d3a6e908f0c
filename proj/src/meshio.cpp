#include "autorig/meshio.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace autorig {
namespace {

std::string at_line(std::size_t line) { return " (line " + std::to_string(line) + ")"; }

bool parse_double(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Face token "a", "a/t", "a//n" or "a/t/n"; only the position index is kept.
bool parse_face_index(const std::string& tok, long& out) {
  const std::string head = tok.substr(0, tok.find('/'));
  if (head.empty()) return false;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), out);
  return ec == std::errc() && ptr == head.data() + head.size();
}

}  // namespace

bool is_watertight(const std::vector<Triangle>& triangles) {
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e];
      int b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_use[{a, b}];
    }
  }
  return std::all_of(edge_use.begin(), edge_use.end(),
                     [](const auto& kv) { return kv.second == 2; });
}

TriangleMesh make_mesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                       std::string name) {
  const auto n = static_cast<long>(vertices.size());
  for (std::size_t f = 0; f < triangles.size(); ++f) {
    const auto& t = triangles[f];
    for (int idx : t) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorCode::kIndexRange, "triangle " + std::to_string(f) +
                                                " references vertex " + std::to_string(idx) +
                                                " but mesh has " + std::to_string(n));
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorCode::kTopology, "degenerate triangle " + std::to_string(f));
    }
  }
  TriangleMesh mesh;
  mesh.watertight = is_watertight(triangles);
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  mesh.name = std::move(name);
  return mesh;
}

TriangleMesh read_obj(std::istream& in, const std::string& name) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<std::size_t> face_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);

    if (kind == "v") {
      if (toks.size() < 3) throw Error(ErrorCode::kParse, "vertex needs 3 coordinates" + at_line(line_no));
      Vec3 p;
      for (int c = 0; c < 3; ++c) {
        if (!parse_double(toks[c], p[c])) {
          throw Error(ErrorCode::kParse, "bad coordinate '" + toks[c] + "'" + at_line(line_no));
        }
      }
      vertices.push_back(p);
    } else if (kind == "f") {
      if (toks.size() != 3) {
        throw Error(ErrorCode::kTopology, "face with " + std::to_string(toks.size()) +
                                              " vertices, only triangles are accepted" + at_line(line_no));
      }
      Triangle t{};
      for (int c = 0; c < 3; ++c) {
        long idx = 0;
        if (!parse_face_index(toks[c], idx)) {
          throw Error(ErrorCode::kParse, "bad face index '" + toks[c] + "'" + at_line(line_no));
        }
        if (idx < 1 || idx > static_cast<long>(1) << 30) {
          throw Error(ErrorCode::kIndexRange, "face index " + toks[c] + at_line(line_no));
        }
        t[c] = static_cast<int>(idx - 1);
      }
      triangles.push_back(t);
      face_lines.push_back(line_no);
    }
    // Other record types (vt, vn, o, g, usemtl, ...) are ignored.
  }

  for (std::size_t f = 0; f < triangles.size(); ++f) {
    for (int idx : triangles[f]) {
      if (idx >= static_cast<int>(vertices.size())) {
        throw Error(ErrorCode::kIndexRange,
                    "face index " + std::to_string(idx + 1) + " exceeds vertex count " +
                        std::to_string(vertices.size()) + at_line(face_lines[f]));
      }
    }
  }
  return make_mesh(std::move(vertices), std::move(triangles), name);
}

TriangleMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_obj(in, std::filesystem::path(path).stem().string());
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  char buf[128];
  if (!mesh.name.empty()) out << "o " << mesh.name << '\n';
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void write_mesh(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_obj(mesh, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace autorig
