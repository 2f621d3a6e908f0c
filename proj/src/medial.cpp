#include "autorig/medial.hpp"

#include <algorithm>
#include <ostream>

namespace autorig {

bool is_medial(const DistanceField& field, const Voxel& v, double min_dist) {
  if (!field.grid().solid(v)) return false;
  const double d = field.dist(v);
  if (d < min_dist) return false;
  for (int a = 0; a < 3; ++a) {
    Voxel lo = v;
    Voxel hi = v;
    --lo[a];
    ++hi[a];
    if (d >= field.dist(lo) && d >= field.dist(hi)) return true;
  }
  return false;
}

MedialSurface extract_dms(const DistanceField& field, double min_dist) {
  if (min_dist < 1.0) throw Error(ErrorCode::kOutOfRange, "dms min_dist must be >= 1");
  const auto& grid = field.grid();
  MedialSurface dms;
  dms.min_dist = min_dist;
  dms.mask.assign(grid.size(), 0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!grid.occupancy()[idx]) continue;
    const Voxel v = grid.voxel(idx);
    if (is_medial(field, v, min_dist)) {
      dms.mask[idx] = 1;
      dms.voxels.push_back(v);
    }
  }
  if (dms.voxels.empty()) {
    throw Error(ErrorCode::kEmptyResult,
                "no medial voxels with dist >= " + std::to_string(min_dist) +
                    "; resolution is too low for this shape");
  }
  std::sort(dms.voxels.begin(), dms.voxels.end());
  return dms;
}

void write_medial_dump(const MedialSurface& dms, std::ostream& out) {
  for (const auto& v : dms.voxels) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
}

}  // namespace autorig

namespace autorig {

MedialSurface medial_from_voxels(const VoxelGrid& grid, std::vector<Voxel> voxels, double min_dist) {
  MedialSurface dms;
  dms.min_dist = min_dist;
  dms.mask.assign(grid.size(), 0);
  std::sort(voxels.begin(), voxels.end());
  voxels.erase(std::unique(voxels.begin(), voxels.end()), voxels.end());
  for (const auto& v : voxels) {
    if (!grid.in_bounds(v)) throw Error(ErrorCode::kOutOfRange, "medial voxel outside grid");
    dms.mask[grid.index(v)] = 1;
  }
  dms.voxels = std::move(voxels);
  return dms;
}

}  // namespace autorig
