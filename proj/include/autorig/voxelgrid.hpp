#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "autorig/common.hpp"
#include "autorig/meshio.hpp"

namespace autorig {

struct GridSpec {
  int resolution = 64;  // voxels along the longest bounding-box axis
  int padding = 1;      // empty layers around the model
  Vec3 origin = Vec3::Zero();
  double cell_size = 1.0;
  std::array<int, 3> dims{0, 0, 0};
};

/// Spec sized so the mesh bounding box spans `resolution` cells along its
/// longest axis, with `padding` empty layers on every side.
GridSpec make_grid_spec(const TriangleMesh& mesh, int resolution, int padding = 1);

/// Dense solid occupancy grid, i fastest.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  const std::array<int, 3>& dims() const { return spec_.dims; }
  double cell_size() const { return spec_.cell_size; }
  std::size_t size() const { return occupancy_.size(); }

  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < spec_.dims[0] && j < spec_.dims[1] &&
           k < spec_.dims[2];
  }
  bool in_bounds(const Voxel& v) const { return in_bounds(v[0], v[1], v[2]); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(spec_.dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(spec_.dims[1]) * k);
  }
  std::size_t index(const Voxel& v) const { return index(v[0], v[1], v[2]); }
  Voxel voxel(std::size_t index) const;

  /// Out-of-range coordinates read as empty.
  bool solid(int i, int j, int k) const { return in_bounds(i, j, k) && occupancy_[index(i, j, k)] != 0; }
  bool solid(const Voxel& v) const { return solid(v[0], v[1], v[2]); }
  void set(const Voxel& v, bool value) { occupancy_[index(v)] = value ? 1 : 0; }

  std::size_t solid_count() const;
  const std::vector<std::uint8_t>& occupancy() const { return occupancy_; }

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> occupancy_;
};

struct VoxelizeOptions {
  int padding = 1;
  int ray_axis = 0;  // parity rays are cast along +x (0), +y (1) or +z (2)
};

/// Solid voxelization by voxel-center ray parity. Requires a watertight mesh
/// and resolution >= 8.
VoxelGrid voxelize(const TriangleMesh& mesh, int resolution, const VoxelizeOptions& options = {});

/// Same as voxelize() but on a caller-supplied grid spec (no resolution floor).
VoxelGrid voxelize(const TriangleMesh& mesh, const GridSpec& spec, int ray_axis = 0);

Vec3 voxel_to_world(const VoxelGrid& grid, const Voxel& ijk);
Voxel world_to_voxel(const VoxelGrid& grid, const Vec3& p);

/// One `i j k` line per solid voxel, index order.
void write_voxel_dump(const VoxelGrid& grid, std::ostream& out);

}  // namespace autorig
