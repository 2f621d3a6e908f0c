#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <Eigen/Geometry>

namespace autorig::fixtures {

TriangleMesh tetrahedron() {
  return make_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)},
                   {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}, "tetrahedron");
}

TriangleMesh cube(const Vec3& lo, double s) {
  std::vector<Vec3> v;
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) v.push_back(lo + s * Vec3(i, j, k));
    }
  }
  // vertex index = i + 2j + 4k
  std::vector<Triangle> t = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return make_mesh(std::move(v), std::move(t), "cube");
}

TriangleMesh icosphere(int subdivisions, double radius) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                         {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid[key] = id;
      return id;
    };
    std::vector<Triangle> next;
    for (const auto& t : f) {
      const int ab = midpoint(t[0], t[1]);
      const int bc = midpoint(t[1], t[2]);
      const int ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (auto& p : v) p *= radius;
  return make_mesh(std::move(v), std::move(f), "icosphere");
}

TriangleMesh tube(double x0, double x1, double radius, int rings, int sides) {
  std::vector<Vec3> v;
  const int last = rings - 1;
  for (int r = 0; r < rings; ++r) {
    // symmetric sample positions: x(r) = -x(last - r) exactly when x0 = -x1
    const double x = (r * 2 < last) ? x0 + (x1 - x0) * r / last : -(x0 + (x1 - x0) * (last - r) / last);
    for (int s = 0; s < sides; ++s) {
      const double a = 2.0 * M_PI * s / sides;
      v.push_back({x, radius * std::cos(a), radius * std::sin(a)});
    }
  }
  if (x0 != -x1) {
    for (int r = 0; r < rings; ++r) {
      for (int s = 0; s < sides; ++s) v[r * sides + s].x() = x0 + (x1 - x0) * r / last;
    }
  }
  const int cap0 = static_cast<int>(v.size());
  v.push_back({x0 - 0.5 * radius, 0, 0});
  const int cap1 = static_cast<int>(v.size());
  v.push_back({x1 + 0.5 * radius, 0, 0});
  std::vector<Triangle> f;
  for (int r = 0; r + 1 < rings; ++r) {
    for (int s = 0; s < sides; ++s) {
      const int a = r * sides + s;
      const int b = r * sides + (s + 1) % sides;
      const int c = (r + 1) * sides + s;
      const int d = (r + 1) * sides + (s + 1) % sides;
      // the diagonal flips at the midpoint so the triangulation mirrors too
      if (r * 2 < last) {
        f.push_back({a, b, d});
        f.push_back({a, d, c});
      } else {
        f.push_back({a, b, c});
        f.push_back({b, d, c});
      }
    }
  }
  for (int s = 0; s < sides; ++s) {
    f.push_back({cap0, (s + 1) % sides, s});
    f.push_back({cap1, last * sides + s, last * sides + (s + 1) % sides});
  }
  return make_mesh(std::move(v), std::move(f), "tube");
}

double capsule_sdf(const std::vector<Capsule>& parts, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : parts) best = std::min(best, point_segment_distance(p, c.a, c.b).distance - c.radius);
  return best;
}

TriangleMesh marching_tetrahedra(const std::function<double(const Vec3&)>& f, const Vec3& lo, const Vec3& hi,
                                 double spacing) {
  std::array<int, 3> n{};
  for (int a = 0; a < 3; ++a) n[a] = static_cast<int>(std::ceil((hi[a] - lo[a]) / spacing)) + 1;
  auto node_id = [&](int i, int j, int k) {
    return static_cast<std::int64_t>(i) + static_cast<std::int64_t>(n[0]) * (j + static_cast<std::int64_t>(n[1]) * k);
  };
  auto node_pos = [&](int i, int j, int k) { return Vec3(lo + spacing * Vec3(i, j, k)); };
  std::vector<double> value(static_cast<std::size_t>(n[0]) * n[1] * n[2]);
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        double x = f(node_pos(i, j, k));
        if (x == 0.0) x = 1e-12;
        value[node_id(i, j, k)] = x;
      }
    }
  }
  static const int kTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};

  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::unordered_map<std::int64_t, int> edge_vertex;
  const std::int64_t total = static_cast<std::int64_t>(n[0]) * n[1] * n[2];
  auto edge_point = [&](std::int64_t a, std::int64_t b, const Vec3& pa, const Vec3& pb) {
    const std::int64_t lo_id = std::min(a, b);
    const std::int64_t hi_id = std::max(a, b);
    const std::int64_t key = lo_id * total + hi_id;
    const auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    const double fa = value[a];
    const double fb = value[b];
    const double t = fa / (fa - fb);
    vertices.push_back(pa + t * (pb - pa));
    const int id = static_cast<int>(vertices.size()) - 1;
    edge_vertex.emplace(key, id);
    return id;
  };

  for (int k = 0; k + 1 < n[2]; ++k) {
    for (int j = 0; j + 1 < n[1]; ++j) {
      for (int i = 0; i + 1 < n[0]; ++i) {
        std::int64_t ids[8];
        Vec3 pos[8];
        for (int c = 0; c < 8; ++c) {
          const int ci = i + (c & 1), cj = j + ((c >> 1) & 1), ck = k + ((c >> 2) & 1);
          ids[c] = node_id(ci, cj, ck);
          pos[c] = node_pos(ci, cj, ck);
        }
        for (const auto& tet : kTets) {
          std::vector<int> in, out;
          for (int c : tet) (value[ids[c]] < 0.0 ? in : out).push_back(c);
          if (in.empty() || out.empty()) continue;
          Vec3 in_centroid = Vec3::Zero(), out_centroid = Vec3::Zero();
          for (int c : in) in_centroid += pos[c] / static_cast<double>(in.size());
          for (int c : out) out_centroid += pos[c] / static_cast<double>(out.size());
          auto emit = [&](int a, int b, int c) {
            const Vec3 normal = (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]);
            if (normal.dot(out_centroid - in_centroid) < 0.0) std::swap(b, c);
            triangles.push_back({a, b, c});
          };
          auto ep = [&](int a, int b) { return edge_point(ids[a], ids[b], pos[a], pos[b]); };
          if (in.size() == 1 || out.size() == 1) {
            const bool lone_inside = in.size() == 1;
            const int lone = lone_inside ? in[0] : out[0];
            const auto& others = lone_inside ? out : in;
            emit(ep(lone, others[0]), ep(lone, others[1]), ep(lone, others[2]));
          } else {
            const int ac = ep(in[0], out[0]);
            const int ad = ep(in[0], out[1]);
            const int bd = ep(in[1], out[1]);
            const int bc = ep(in[1], out[0]);
            emit(ac, ad, bd);
            emit(ac, bd, bc);
          }
        }
      }
    }
  }
  return make_mesh(std::move(vertices), std::move(triangles), "iso");
}

TriangleMesh capsule_mesh(const std::vector<Capsule>& parts, double spacing) {
  Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
  for (const auto& c : parts) {
    lo = lo.cwiseMin(c.a - Vec3::Constant(c.radius)).cwiseMin(c.b - Vec3::Constant(c.radius));
    hi = hi.cwiseMax(c.a + Vec3::Constant(c.radius)).cwiseMax(c.b + Vec3::Constant(c.radius));
  }
  lo -= Vec3::Constant(2.0 * spacing);
  hi += Vec3::Constant(2.0 * spacing);
  return marching_tetrahedra([&](const Vec3& p) { return capsule_sdf(parts, p); }, lo, hi, spacing);
}

std::vector<Capsule> star_parts() {
  std::vector<Capsule> parts{{Vec3::Zero(), Vec3::Zero(), 0.42}};
  for (int arm = 0; arm < 3; ++arm) {
    const double a = M_PI / 2.0 + arm * 2.0 * M_PI / 3.0;
    parts.push_back({Vec3::Zero(), 1.5 * Vec3(std::cos(a), std::sin(a), 0.0), 0.24});
  }
  return parts;
}

std::vector<Capsule> humanoid_parts() {
  return {
      {Vec3(0, 0.95, 0), Vec3(0, 1.5, 0), 0.17},      // torso
      {Vec3(0, 1.5, 0), Vec3(0, 1.8, 0), 0.08},       // neck
      {Vec3(0, 1.82, 0), Vec3(0, 1.84, 0), 0.14},     // head
      {Vec3(0, 1.45, 0), Vec3(0.75, 1.45, 0), 0.075}, // left arm
      {Vec3(0, 1.45, 0), Vec3(-0.75, 1.45, 0), 0.075},
      {Vec3(0.11, 0.95, 0), Vec3(0.18, 0.06, 0), 0.095},  // left leg
      {Vec3(-0.11, 0.95, 0), Vec3(-0.18, 0.06, 0), 0.095},
  };
}

std::vector<Capsule> quadruped_parts() {
  return {
      {Vec3(-0.55, 1.0, 0), Vec3(0.55, 1.0, 0), 0.22},       // body
      {Vec3(0.5, 1.0, 0.13), Vec3(0.5, 0.07, 0.16), 0.08},   // front left leg
      {Vec3(0.5, 1.0, -0.13), Vec3(0.5, 0.07, -0.16), 0.08},
      {Vec3(-0.5, 1.0, 0.13), Vec3(-0.5, 0.07, 0.16), 0.08}, // back left leg
      {Vec3(-0.5, 1.0, -0.13), Vec3(-0.5, 0.07, -0.16), 0.08},
      {Vec3(0.55, 1.05, 0), Vec3(0.85, 1.45, 0), 0.1},       // neck
      {Vec3(0.85, 1.5, 0), Vec3(1.15, 1.55, 0), 0.11},       // head
      {Vec3(-0.55, 1.05, 0), Vec3(-1.05, 1.2, 0), 0.075},    // tail
  };
}

TriangleMesh star_mesh() {
  auto m = capsule_mesh(star_parts(), 0.06);
  m.name = "star";
  return m;
}

TriangleMesh humanoid_mesh() {
  auto m = capsule_mesh(humanoid_parts(), 0.035);
  m.name = "humanoid";
  return m;
}

TriangleMesh quadruped_mesh() {
  auto m = capsule_mesh(quadruped_parts(), 0.065);
  m.name = "quadruped";
  return m;
}

VoxelGrid box_grid(std::array<int, 3> dims, const std::vector<Voxel>& solid) {
  GridSpec spec;
  spec.resolution = *std::max_element(dims.begin(), dims.end());
  spec.padding = 1;
  spec.cell_size = 1.0;
  spec.origin = Vec3::Zero();
  spec.dims = dims;
  VoxelGrid grid(spec);
  for (const auto& v : solid) grid.set(v, true);
  return grid;
}

VoxelGrid random_blob_grid(std::mt19937_64& rng, std::array<int, 3> dims, int balls, double rmin, double rmax) {
  std::vector<Voxel> solid;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<Vec3, double>> centers;
  for (int b = 0; b < balls; ++b) {
    const Vec3 c(1.5 + unit(rng) * (dims[0] - 3), 1.5 + unit(rng) * (dims[1] - 3), 1.5 + unit(rng) * (dims[2] - 3));
    centers.push_back({c, rmin + unit(rng) * (rmax - rmin)});
  }
  for (int k = 1; k + 1 < dims[2]; ++k) {
    for (int j = 1; j + 1 < dims[1]; ++j) {
      for (int i = 1; i + 1 < dims[0]; ++i) {
        const Vec3 p(i + 0.5, j + 0.5, k + 0.5);
        for (const auto& [c, r] : centers) {
          if ((p - c).norm() <= r) {
            solid.push_back({i, j, k});
            break;
          }
        }
      }
    }
  }
  return box_grid(dims, solid);
}

namespace {

struct GraphSpec {
  std::vector<Vec3> vertices;
  std::vector<double> radii;
  std::vector<std::pair<int, int>> edges;
};

GraphSpec humanoid_spec() {
  GraphSpec g;
  auto add = [&](Vec3 p, double r) {
    g.vertices.push_back(p);
    g.radii.push_back(r);
    return static_cast<int>(g.vertices.size()) - 1;
  };
  const int pelvis = add({0, 1.0, 0}, 0.15);
  const int belly = add({0, 1.25, 0}, 0.16);
  const int chest = add({0, 1.5, 0}, 0.16);
  const int neck = add({0, 1.72, 0}, 0.08);
  const int head = add({0, 1.9, 0}, 0.12);
  const int lsh = add({0.3, 1.5, 0}, 0.08);
  const int lhand = add({0.75, 1.5, 0}, 0.06);
  const int rsh = add({-0.3, 1.5, 0}, 0.08);
  const int rhand = add({-0.75, 1.5, 0}, 0.06);
  const int lhip = add({0.12, 0.6, 0}, 0.1);
  const int lfoot = add({0.2, 0.0, 0}, 0.08);
  const int rhip = add({-0.12, 0.6, 0}, 0.1);
  const int rfoot = add({-0.2, 0.0, 0}, 0.08);
  g.edges = {{pelvis, belly}, {belly, chest}, {chest, neck}, {neck, head}, {chest, lsh}, {lsh, lhand},
             {chest, rsh},    {rsh, rhand},   {pelvis, lhip}, {lhip, lfoot}, {pelvis, rhip}, {rhip, rfoot}};
  return g;
}

}  // namespace

EmbedGraph humanoid_graph() {
  auto g = humanoid_spec();
  return EmbedGraph(std::move(g.vertices), std::move(g.radii), std::move(g.edges));
}

EmbedGraph perturbed_humanoid_graph(std::mt19937_64& rng, int extra_vertices) {
  auto g = humanoid_spec();
  std::normal_distribution<double> jitter(0.0, 0.04);
  for (auto& p : g.vertices) p += Vec3(jitter(rng), jitter(rng), jitter(rng));
  std::uniform_int_distribution<int> pick(0, static_cast<int>(g.vertices.size()) - 1);
  for (int e = 0; e < extra_vertices; ++e) {
    const int anchor = pick(rng);
    g.vertices.push_back(g.vertices[anchor] + Vec3(0.15 + jitter(rng), jitter(rng), 0.1 + jitter(rng)));
    g.radii.push_back(0.05);
    g.edges.push_back({anchor, static_cast<int>(g.vertices.size()) - 1});
  }
  return EmbedGraph(std::move(g.vertices), std::move(g.radii), std::move(g.edges));
}

}  // namespace autorig::fixtures
