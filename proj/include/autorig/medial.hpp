#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "autorig/distfield.hpp"

namespace autorig {

/// Discrete medial surface: solid voxels on a ridge of the distance map.
struct MedialSurface {
  std::vector<Voxel> voxels;        // lexicographic (i, j, k) order
  std::vector<std::uint8_t> mask;   // per grid index, 1 for medial voxels
  double min_dist = 2.0;

  bool contains(const VoxelGrid& grid, const Voxel& v) const {
    return grid.in_bounds(v) && mask[grid.index(v)] != 0;
  }
};

/// The ridge predicate: solid, dist >= min_dist, and a weak local maximum
/// along at least one axis.
bool is_medial(const DistanceField& field, const Voxel& v, double min_dist);

/// Throws kEmptyResult when nothing qualifies.
MedialSurface extract_dms(const DistanceField& field, double min_dist = 2.0);

void write_medial_dump(const MedialSurface& dms, std::ostream& out);

}  // namespace autorig

namespace autorig {

/// Medial surface from an explicit voxel list (reloaded dumps, fixtures).
/// Voxels must lie inside the grid.
MedialSurface medial_from_voxels(const VoxelGrid& grid, std::vector<Voxel> voxels,
                                 double min_dist = 1.0);

}  // namespace autorig
