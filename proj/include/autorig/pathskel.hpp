#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "autorig/medial.hpp"

namespace autorig {

/// The globally most central medial voxel; root of the path tree.
struct Heart {
  Voxel voxel{};
  double dist = 0.0;
};

/// Per-voxel Dijkstra cost model for path search.
enum class PathCost {
  kStepLength,  // entering v costs s / dist(v)^3, s = 1, sqrt2 or sqrt3
  kPerVoxel,       // entering v costs 1 / dist(v)^3
};

/// One path-tree chain. voxels.front() is the accepted extreme point,
/// voxels.back() the voxel where the chain meets the existing tree.
struct Chain {
  std::vector<Voxel> voxels;
};

struct PathTree {
  Heart root;
  std::vector<Chain> chains;
  std::vector<Voxel> covered;   // sorted
  std::vector<Voxel> rejected;  // extremes dropped by coverage or threshold
  std::vector<std::string> warnings;
};

struct PathTreeOptions {
  double accept_threshold = 4.0;  // voxel units
  PathCost cost = PathCost::kStepLength;
};

struct SmoothChain {
  std::vector<Vec3> points;
};

/// Max-dist medial voxel, ties to the lexicographically smallest (i, j, k).
Heart find_heart(const MedialSurface& dms, const DistanceField& field);

/// Hop depth from the heart over the 26-connected medial voxels. Medial
/// components not reachable inside the medial set are seeded at their voxel
/// nearest (in solid-voxel hops) to the heart, at that hop depth. -1 marks
/// voxels in solid components without the heart.
std::vector<int> medial_depth(const MedialSurface& dms, const DistanceField& field, const Heart& heart);

/// Local maxima of medial_depth, sorted by decreasing depth then (i, j, k).
std::vector<Voxel> find_extreme_points(const MedialSurface& dms, const DistanceField& field,
                                       const Heart& heart);

/// Sum of 1 / dist^3 over the path. Throws kContractViolation on an empty voxel.
double path_weight(const std::vector<Voxel>& path, const DistanceField& field);

/// The quantity the path search minimizes, under the given cost model. Equals
/// path_weight() for PathCost::kPerVoxel.
double path_cost(const std::vector<Voxel>& path, const DistanceField& field, PathCost cost);

PathTree build_path_tree(const MedialSurface& dms, const DistanceField& field, const Heart& heart,
                         const std::vector<Voxel>& extremes, const PathTreeOptions& options = {});

/// Endpoint-pinned (1, 2, 1) / 4 smoothing of the chain's world-space voxel centers.
SmoothChain smooth_chain(const std::vector<Voxel>& chain, const VoxelGrid& grid, int iterations = 10);

/// Chains as OBJ polylines (`v` + `l` records).
void write_chain_dump(const std::vector<SmoothChain>& chains, std::ostream& out);

/// The 26 neighbor offsets of a voxel.
const std::vector<Voxel>& neighbor_offsets_26();

}  // namespace autorig
