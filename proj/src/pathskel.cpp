#include "autorig/pathskel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>

namespace autorig {
namespace {

constexpr double kUnreached = std::numeric_limits<double>::infinity();

Voxel add(const Voxel& a, const Voxel& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

double step_length(const Voxel& d) {
  return std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
}

double inv_cube(double d) { return 1.0 / (d * d * d); }

using QueueEntry = std::pair<double, std::size_t>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

// Multi-source Dijkstra over solid voxels with Euclidean step lengths.
std::vector<double> geodesic_from(const VoxelGrid& grid, const std::vector<std::size_t>& sources) {
  std::vector<double> dist(grid.size(), kUnreached);
  MinQueue queue;
  for (auto s : sources) {
    dist[s] = 0.0;
    queue.push({0.0, s});
  }
  const auto& offsets = neighbor_offsets_26();
  while (!queue.empty()) {
    const auto [d, idx] = queue.top();
    queue.pop();
    if (d > dist[idx]) continue;
    const Voxel v = grid.voxel(idx);
    for (const auto& off : offsets) {
      const Voxel w = add(v, off);
      if (!grid.solid(w)) continue;
      const std::size_t widx = grid.index(w);
      const double nd = d + step_length(off);
      if (nd < dist[widx]) {
        dist[widx] = nd;
        queue.push({nd, widx});
      }
    }
  }
  return dist;
}

// Path from `start` to the nearest voxel with on_tree != 0, minimizing the
// cost model. Empty result when unreachable.
std::vector<Voxel> cheapest_path_to_tree(const DistanceField& field, const Voxel& start,
                                         const std::vector<std::uint8_t>& on_tree, PathCost cost) {
  const auto& grid = field.grid();
  std::vector<double> best(grid.size(), kUnreached);
  std::vector<std::size_t> prev(grid.size(), std::numeric_limits<std::size_t>::max());
  const std::size_t s = grid.index(start);
  best[s] = inv_cube(field.dist(s));
  MinQueue queue;
  queue.push({best[s], s});
  const auto& offsets = neighbor_offsets_26();
  std::size_t reached = std::numeric_limits<std::size_t>::max();
  while (!queue.empty()) {
    const auto [c, idx] = queue.top();
    queue.pop();
    if (c > best[idx]) continue;
    if (on_tree[idx]) {
      reached = idx;
      break;
    }
    const Voxel v = grid.voxel(idx);
    for (const auto& off : offsets) {
      const Voxel w = add(v, off);
      if (!grid.solid(w)) continue;
      const std::size_t widx = grid.index(w);
      const double factor = cost == PathCost::kStepLength ? step_length(off) : 1.0;
      const double nc = c + factor * inv_cube(field.dist(widx));
      if (nc < best[widx]) {
        best[widx] = nc;
        prev[widx] = idx;
        queue.push({nc, widx});
      }
    }
  }
  std::vector<Voxel> path;
  if (reached == std::numeric_limits<std::size_t>::max()) return path;
  for (std::size_t idx = reached; idx != std::numeric_limits<std::size_t>::max(); idx = prev[idx]) {
    path.push_back(grid.voxel(idx));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void cover_sphere(const MedialSurface& dms, const DistanceField& field, const Voxel& center,
                  std::vector<std::uint8_t>& covered) {
  const auto& grid = field.grid();
  const std::int64_t r2 = field.squared(center);
  const int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(r2))));
  for (int dk = -r; dk <= r; ++dk) {
    for (int dj = -r; dj <= r; ++dj) {
      for (int di = -r; di <= r; ++di) {
        if (static_cast<std::int64_t>(di) * di + dj * dj + dk * dk > r2) continue;
        const Voxel u{center[0] + di, center[1] + dj, center[2] + dk};
        if (dms.contains(grid, u)) covered[grid.index(u)] = 1;
      }
    }
  }
}

}  // namespace

const std::vector<Voxel>& neighbor_offsets_26() {
  static const std::vector<Voxel> offsets = [] {
    std::vector<Voxel> out;
    for (int dk = -1; dk <= 1; ++dk) {
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di || dj || dk) out.push_back({di, dj, dk});
        }
      }
    }
    return out;
  }();
  return offsets;
}

Heart find_heart(const MedialSurface& dms, const DistanceField& field) {
  if (dms.voxels.empty()) throw Error(ErrorCode::kEmptyResult, "medial surface is empty; no heart");
  Heart heart{dms.voxels.front(), field.dist(dms.voxels.front())};
  for (const auto& v : dms.voxels) {
    // voxels are lexicographically sorted, so strict > keeps the first maximum
    if (field.dist(v) > heart.dist) heart = {v, field.dist(v)};
  }
  return heart;
}

std::vector<int> medial_depth(const MedialSurface& dms, const DistanceField& field, const Heart& heart) {
  const auto& grid = field.grid();
  if (!dms.contains(grid, heart.voxel)) {
    throw Error(ErrorCode::kContractViolation, "heart is not a medial voxel");
  }
  std::vector<int> depth(grid.size(), -1);
  const auto& offsets = neighbor_offsets_26();
  std::deque<std::size_t> queue;
  auto flood = [&]() {
    while (!queue.empty()) {
      const std::size_t idx = queue.front();
      queue.pop_front();
      const Voxel v = grid.voxel(idx);
      for (const auto& off : offsets) {
        const Voxel w = add(v, off);
        if (!dms.contains(grid, w)) continue;
        const std::size_t widx = grid.index(w);
        if (depth[widx] >= 0) continue;
        depth[widx] = depth[idx] + 1;
        queue.push_back(widx);
      }
    }
  };
  depth[grid.index(heart.voxel)] = 0;
  queue.push_back(grid.index(heart.voxel));
  flood();

  const bool all_reached = std::all_of(dms.voxels.begin(), dms.voxels.end(),
                                       [&](const Voxel& v) { return depth[grid.index(v)] >= 0; });
  if (all_reached) return depth;

  // Hop depth through solid voxels for medial pieces the medial BFS missed.
  std::vector<int> solid_hops(grid.size(), -1);
  {
    std::deque<std::size_t> q{grid.index(heart.voxel)};
    solid_hops[q.front()] = 0;
    while (!q.empty()) {
      const std::size_t idx = q.front();
      q.pop_front();
      const Voxel v = grid.voxel(idx);
      for (const auto& off : offsets) {
        const Voxel w = add(v, off);
        if (!grid.solid(w)) continue;
        const std::size_t widx = grid.index(w);
        if (solid_hops[widx] >= 0) continue;
        solid_hops[widx] = solid_hops[idx] + 1;
        q.push_back(widx);
      }
    }
  }
  while (true) {
    std::size_t seed = std::numeric_limits<std::size_t>::max();
    for (const auto& v : dms.voxels) {
      const std::size_t idx = grid.index(v);
      if (depth[idx] >= 0 || solid_hops[idx] < 0) continue;
      if (seed == std::numeric_limits<std::size_t>::max() || solid_hops[idx] < solid_hops[seed]) seed = idx;
    }
    if (seed == std::numeric_limits<std::size_t>::max()) break;
    depth[seed] = solid_hops[seed];
    queue.push_back(seed);
    flood();
  }
  return depth;
}

std::vector<Voxel> find_extreme_points(const MedialSurface& dms, const DistanceField& field,
                                       const Heart& heart) {
  const auto& grid = field.grid();
  const std::vector<int> depth = medial_depth(dms, field, heart);
  std::vector<std::pair<int, Voxel>> found;
  for (const auto& v : dms.voxels) {
    const int d = depth[grid.index(v)];
    if (d < 0) continue;
    bool is_max = true;
    for (const auto& off : neighbor_offsets_26()) {
      const Voxel w = add(v, off);
      if (dms.contains(grid, w) && depth[grid.index(w)] > d) {
        is_max = false;
        break;
      }
    }
    if (is_max) found.push_back({d, v});
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<Voxel> out;
  out.reserve(found.size());
  for (const auto& f : found) out.push_back(f.second);
  return out;
}

double path_weight(const std::vector<Voxel>& path, const DistanceField& field) {
  double w = 0.0;
  for (const auto& v : path) {
    const double d = field.dist(v);
    if (!(d > 0.0)) throw Error(ErrorCode::kContractViolation, "path passes through a zero-distance voxel");
    w += inv_cube(d);
  }
  return w;
}

double path_cost(const std::vector<Voxel>& path, const DistanceField& field, PathCost cost) {
  if (cost == PathCost::kPerVoxel) return path_weight(path, field);
  double w = 0.0;
  for (std::size_t n = 0; n < path.size(); ++n) {
    const double d = field.dist(path[n]);
    if (!(d > 0.0)) throw Error(ErrorCode::kContractViolation, "path passes through a zero-distance voxel");
    double factor = 1.0;
    if (n > 0) {
      const Voxel step{path[n][0] - path[n - 1][0], path[n][1] - path[n - 1][1], path[n][2] - path[n - 1][2]};
      factor = step_length(step);
    }
    w += factor * inv_cube(d);
  }
  return w;
}

PathTree build_path_tree(const MedialSurface& dms, const DistanceField& field, const Heart& heart,
                         const std::vector<Voxel>& extremes, const PathTreeOptions& options) {
  const auto& grid = field.grid();
  PathTree tree;
  tree.root = heart;
  std::vector<std::uint8_t> on_tree(grid.size(), 0);
  std::vector<std::uint8_t> covered(grid.size(), 0);
  on_tree[grid.index(heart.voxel)] = 1;
  cover_sphere(dms, field, heart.voxel, covered);

  auto covered_sources = [&] {
    std::vector<std::size_t> out;
    for (const auto& v : dms.voxels) {
      if (covered[grid.index(v)]) out.push_back(grid.index(v));
    }
    return out;
  };
  std::vector<double> to_covered = geodesic_from(grid, covered_sources());

  for (const auto& extreme : extremes) {
    const std::size_t eidx = grid.index(extreme);
    if (covered[eidx] || on_tree[eidx]) {
      tree.rejected.push_back(extreme);
      continue;
    }
    if (to_covered[eidx] < options.accept_threshold) {
      tree.rejected.push_back(extreme);
      continue;
    }
    std::vector<Voxel> path = cheapest_path_to_tree(field, extreme, on_tree, options.cost);
    if (path.empty()) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "extreme (%d, %d, %d) cannot reach the tree; chain skipped",
                    extreme[0], extreme[1], extreme[2]);
      tree.warnings.emplace_back(buf);
      continue;
    }
    for (const auto& v : path) {
      on_tree[grid.index(v)] = 1;
      cover_sphere(dms, field, v, covered);
    }
    tree.chains.push_back({std::move(path)});
    to_covered = geodesic_from(grid, covered_sources());
  }

  for (const auto& v : dms.voxels) {
    if (covered[grid.index(v)]) tree.covered.push_back(v);
  }
  return tree;
}

SmoothChain smooth_chain(const std::vector<Voxel>& chain, const VoxelGrid& grid, int iterations) {
  if (chain.size() < 2) throw Error(ErrorCode::kContractViolation, "chain needs at least 2 voxels");
  SmoothChain out;
  out.points.reserve(chain.size());
  for (const auto& v : chain) out.points.push_back(voxel_to_world(grid, v));
  std::vector<Vec3> next = out.points;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t n = 1; n + 1 < out.points.size(); ++n) {
      next[n] = (out.points[n - 1] + 2.0 * out.points[n] + out.points[n + 1]) / 4.0;
    }
    std::swap(out.points, next);
    next.front() = out.points.front();
    next.back() = out.points.back();
  }
  return out;
}

void write_chain_dump(const std::vector<SmoothChain>& chains, std::ostream& out) {
  char buf[128];
  std::size_t base = 1;
  for (const auto& c : chains) {
    for (const auto& p : c.points) {
      std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
      out << buf;
    }
    out << 'l';
    for (std::size_t n = 0; n < c.points.size(); ++n) out << ' ' << base + n;
    out << '\n';
    base += c.points.size();
  }
}

}  // namespace autorig
