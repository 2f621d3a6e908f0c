#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "autorig/voxelgrid.hpp"

namespace autorig {

/// Exact Euclidean distance map: for every solid voxel, the distance (voxel
/// units) from its center to the nearest empty voxel center; 0 for empties.
class DistanceField {
 public:
  DistanceField(VoxelGrid grid, std::vector<std::int64_t> squared);

  const VoxelGrid& grid() const { return grid_; }
  double cell_size() const { return grid_.cell_size(); }

  std::int64_t squared(const Voxel& v) const { return squared_[grid_.index(v)]; }
  std::int64_t squared(std::size_t index) const { return squared_[index]; }
  /// Out-of-range voxels read as 0.
  double dist(int i, int j, int k) const {
    return grid_.in_bounds(i, j, k) ? dist_[grid_.index(i, j, k)] : 0.0;
  }
  double dist(const Voxel& v) const { return dist(v[0], v[1], v[2]); }
  double dist(std::size_t index) const { return dist_[index]; }
  double max_dist() const { return max_dist_; }

  const std::vector<std::int64_t>& squared_values() const { return squared_; }

 private:
  VoxelGrid grid_;
  std::vector<std::int64_t> squared_;
  std::vector<double> dist_;
  double max_dist_ = 0.0;
};

/// Separable exact EDT (lower envelope of parabolas per axis, integer
/// arithmetic throughout).
DistanceField compute_edm(const VoxelGrid& grid);

/// Trilinear interpolation of dist * cell_size at a world point. Exact at voxel
/// centers. Throws kOutOfRange outside the grid box.
double query_distance(const DistanceField& field, const Vec3& p);

/// One `i j k dist` line per solid voxel.
void write_distance_dump(const DistanceField& field, std::ostream& out);

}  // namespace autorig
