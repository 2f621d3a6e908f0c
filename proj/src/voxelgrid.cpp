#include "autorig/voxelgrid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace autorig {
namespace {

constexpr double kBaryEps = 1e-12;

struct Projected {
  double u[3];
  double v[3];
  double along[3];
};

enum class RayHit { kMiss, kHit, kDegenerate };

double orient(double ax, double ay, double bx, double by, double cx, double cy) {
  return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

// Intersection of the ray through (qu, qv) along the cast axis with a
// triangle projected to the (u, v) plane. Hits on a projected edge or vertex
// are reported as degenerate.
RayHit intersect(const Projected& t, double qu, double qv, double& along) {
  const double area = orient(t.u[0], t.v[0], t.u[1], t.v[1], t.u[2], t.v[2]);
  if (std::abs(area) < 1e-300) return RayHit::kMiss;
  const double w0 = orient(t.u[1], t.v[1], t.u[2], t.v[2], qu, qv) / area;
  const double w1 = orient(t.u[2], t.v[2], t.u[0], t.v[0], qu, qv) / area;
  const double w2 = 1.0 - w0 - w1;
  if (w0 < -kBaryEps || w1 < -kBaryEps || w2 < -kBaryEps) return RayHit::kMiss;
  along = w0 * t.along[0] + w1 * t.along[1] + w2 * t.along[2];
  if (w0 <= kBaryEps || w1 <= kBaryEps || w2 <= kBaryEps) return RayHit::kDegenerate;
  return RayHit::kHit;
}

}  // namespace

GridSpec make_grid_spec(const TriangleMesh& mesh, int resolution, int padding) {
  if (padding < 1) throw Error(ErrorCode::kOutOfRange, "padding must be >= 1");
  if (resolution < 1) throw Error(ErrorCode::kResolutionTooSmall, "resolution must be positive");
  if (mesh.vertices.empty()) throw Error(ErrorCode::kResolutionTooSmall, "empty mesh");
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const auto& p : mesh.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 extent = hi - lo;
  const double longest = extent.maxCoeff();
  if (!(longest > 0.0)) throw Error(ErrorCode::kResolutionTooSmall, "mesh has zero extent");

  GridSpec spec;
  spec.resolution = resolution;
  spec.padding = padding;
  spec.cell_size = longest / resolution;
  spec.origin = lo - Vec3::Constant(padding * spec.cell_size);
  for (int a = 0; a < 3; ++a) {
    const int cells = std::max(1, static_cast<int>(std::ceil(extent[a] / spec.cell_size - 1e-9)));
    spec.dims[a] = cells + 2 * padding;
  }
  return spec;
}

VoxelGrid::VoxelGrid(const GridSpec& spec) : spec_(spec) {
  if (!(spec.cell_size > 0.0)) throw Error(ErrorCode::kOutOfRange, "cell_size must be positive");
  for (int d : spec.dims) {
    if (d < 1) throw Error(ErrorCode::kOutOfRange, "grid dims must be positive");
  }
  occupancy_.assign(static_cast<std::size_t>(spec.dims[0]) * spec.dims[1] * spec.dims[2], 0);
}

Voxel VoxelGrid::voxel(std::size_t index) const {
  const auto dx = static_cast<std::size_t>(spec_.dims[0]);
  const auto dy = static_cast<std::size_t>(spec_.dims[1]);
  return {static_cast<int>(index % dx), static_cast<int>((index / dx) % dy),
          static_cast<int>(index / (dx * dy))};
}

std::size_t VoxelGrid::solid_count() const {
  return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), 1));
}

VoxelGrid voxelize(const TriangleMesh& mesh, const GridSpec& spec, int ray_axis) {
  if (!mesh.watertight) {
    throw Error(ErrorCode::kNotWatertight,
                "mesh '" + mesh.name + "' is not watertight; solid voxelization needs a closed surface");
  }
  if (ray_axis < 0 || ray_axis > 2) throw Error(ErrorCode::kOutOfRange, "ray axis must be 0, 1 or 2");
  VoxelGrid grid(spec);
  const int a = ray_axis;
  const int b = (a + 1) % 3;
  const int c = (a + 2) % 3;
  const auto& dims = spec.dims;
  const double cell = spec.cell_size;

  std::vector<Projected> tris(mesh.triangles.size());
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(dims[b]) * dims[c]);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto& pr = tris[t];
    double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
    for (int n = 0; n < 3; ++n) {
      const Vec3 p = (mesh.vertices[mesh.triangles[t][n]] - spec.origin) / cell;
      pr.u[n] = p[b];
      pr.v[n] = p[c];
      pr.along[n] = p[a];
      umin = std::min(umin, p[b]);
      umax = std::max(umax, p[b]);
      vmin = std::min(vmin, p[c]);
      vmax = std::max(vmax, p[c]);
    }
    // Column centers sit at index + 0.5; widen by one so perturbed re-casts
    // still see every candidate.
    const int j0 = std::max(0, static_cast<int>(std::floor(umin - 0.5)) - 1);
    const int j1 = std::min(dims[b] - 1, static_cast<int>(std::ceil(umax - 0.5)) + 1);
    const int k0 = std::max(0, static_cast<int>(std::floor(vmin - 0.5)) - 1);
    const int k1 = std::min(dims[c] - 1, static_cast<int>(std::ceil(vmax - 0.5)) + 1);
    for (int k = k0; k <= k1; ++k) {
      for (int j = j0; j <= j1; ++j) buckets[static_cast<std::size_t>(k) * dims[b] + j].push_back(static_cast<int>(t));
    }
  }

  // Ray origins are perturbed (in grid units) when the first cast grazes an
  // edge or vertex.
  const double perturb = 1e-7;
  std::vector<double> hits;
  for (int k = 0; k < dims[c]; ++k) {
    for (int j = 0; j < dims[b]; ++j) {
      const auto& bucket = buckets[static_cast<std::size_t>(k) * dims[b] + j];
      if (bucket.empty()) continue;
      double qu = j + 0.5;
      double qv = k + 0.5;
      for (int attempt = 0; attempt < 2; ++attempt) {
        hits.clear();
        bool degenerate = false;
        for (int t : bucket) {
          double along = 0.0;
          const RayHit h = intersect(tris[t], qu, qv, along);
          if (h == RayHit::kMiss) continue;
          if (h == RayHit::kDegenerate) degenerate = true;
          hits.push_back(along);
        }
        if (!degenerate || attempt == 1) break;
        qu += perturb;
        qv += perturb * 0.6180339887498949;
      }
      std::sort(hits.begin(), hits.end());
      std::size_t crossed = 0;
      for (int i = 0; i < dims[a]; ++i) {
        const double center = i + 0.5;
        while (crossed < hits.size() && hits[crossed] < center) ++crossed;
        if (crossed % 2 == 1) {
          Voxel v{};
          v[a] = i;
          v[b] = j;
          v[c] = k;
          grid.set(v, true);
        }
      }
    }
  }

  // Padding shell stays empty.
  const int pad = spec.padding;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Voxel v = grid.voxel(idx);
    for (int ax = 0; ax < 3; ++ax) {
      if (v[ax] < pad || v[ax] >= dims[ax] - pad) {
        grid.set(v, false);
        break;
      }
    }
  }
  if (grid.solid_count() < 2) {
    throw Error(ErrorCode::kResolutionTooSmall,
                "only " + std::to_string(grid.solid_count()) +
                    " interior voxels at this resolution; increase --resolution");
  }
  return grid;
}

VoxelGrid voxelize(const TriangleMesh& mesh, int resolution, const VoxelizeOptions& options) {
  if (resolution < 8) {
    throw Error(ErrorCode::kResolutionTooSmall,
                "resolution " + std::to_string(resolution) + " is below the minimum of 8");
  }
  if (!mesh.watertight) {
    throw Error(ErrorCode::kNotWatertight,
                "mesh '" + mesh.name + "' is not watertight; solid voxelization needs a closed surface");
  }
  return voxelize(mesh, make_grid_spec(mesh, resolution, options.padding), options.ray_axis);
}

Vec3 voxel_to_world(const VoxelGrid& grid, const Voxel& ijk) {
  if (!grid.in_bounds(ijk)) throw Error(ErrorCode::kOutOfRange, "voxel index outside grid");
  const auto& s = grid.spec();
  return s.origin + (Vec3(ijk[0], ijk[1], ijk[2]) + Vec3::Constant(0.5)) * s.cell_size;
}

Voxel world_to_voxel(const VoxelGrid& grid, const Vec3& p) {
  const auto& s = grid.spec();
  const Vec3 u = (p - s.origin) / s.cell_size;
  const Voxel v{static_cast<int>(std::floor(u.x())), static_cast<int>(std::floor(u.y())),
                static_cast<int>(std::floor(u.z()))};
  if (!grid.in_bounds(v)) throw Error(ErrorCode::kOutOfRange, "point outside grid");
  return v;
}

void write_voxel_dump(const VoxelGrid& grid, std::ostream& out) {
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!grid.occupancy()[idx]) continue;
    const Voxel v = grid.voxel(idx);
    out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
}

}  // namespace autorig
