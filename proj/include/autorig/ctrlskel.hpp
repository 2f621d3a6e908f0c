#pragma once

#include <string>
#include <vector>

#include "autorig/meshio.hpp"
#include "autorig/pathskel.hpp"

namespace autorig {

struct Joint {
  std::string name;
  int parent = -1;  // -1 for the root
  Vec3 position = Vec3::Zero();
};

struct Bone {
  int joint = 0;   // child joint
  int parent = 0;  // parent joint
};

/// Joint hierarchy. The root is joint 0 and parents precede children, so bone
/// b always ends at joint b + 1. Every joint carries 3 rotational DOF.
struct Skeleton {
  static constexpr int kJointDof = 3;

  std::vector<Joint> joints;

  std::size_t bone_count() const { return joints.empty() ? 0 : joints.size() - 1; }
  std::vector<Bone> bones() const;
  /// Hop count from the root to each joint.
  std::vector<int> joint_depths() const;
};

/// Throws kContractViolation if the skeleton breaks a structural invariant
/// (single root at 0, parents first, no zero-length bone).
void validate_skeleton(const Skeleton& skeleton);

struct ChainSplit {
  std::vector<int> indices;      // interior split indices, ascending
  std::vector<int> order;        // the same indices in the order they were chosen
  std::vector<double> max_error; // overall max deviation; [0] before any split, [n] after n splits
};

/// Deviation of points (a, b) from the finite segment [points[a], points[b]].
double segment_error(const std::vector<Vec3>& points, int a, int b);

/// Greedy minimax splitting of a polyline into at most max_segments pieces,
/// stopping early once every piece deviates by at most max_error.
ChainSplit split_chain(const std::vector<Vec3>& points, int max_segments, double max_error);

/// Skeleton from the path tree: root at the heart, one joint per split point
/// and chain tip. A chain meeting the tree inside an existing joint's
/// coverage sphere attaches to that joint; otherwise the owning chain gains an
/// extra joint at the meeting point.
Skeleton build_skeleton(const PathTree& tree, const std::vector<SmoothChain>& chains,
                        const std::vector<ChainSplit>& splits, const DistanceField& field);

/// Mesh vertex -> controlling bone (rigid region binding).
struct SegmentBinding {
  std::vector<int> vertex_bone;

  /// Vertex indices controlled by each bone.
  std::vector<std::vector<int>> bone_vertices(std::size_t bone_count) const;
};

/// Nearest bone segment per vertex; ties go to the bone nearer the root, then
/// to the lower bone index.
SegmentBinding bind_segments(const TriangleMesh& mesh, const Skeleton& skeleton);

}  // namespace autorig
