#pragma once

#include <utility>
#include <vector>

#include <Eigen/Geometry>
#include <Eigen/SparseCore>

#include "autorig/ctrlskel.hpp"
#include "autorig/distfield.hpp"
#include "autorig/meshio.hpp"

namespace autorig {

/// Per-vertex (bone, weight) lists, ascending bone index, weights summing to 1.
struct SkinBinding {
  std::size_t bone_count = 0;
  std::vector<std::vector<std::pair<int, double>>> weights;
};

struct RigidTransform {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  /// (*this) after `rhs`: p -> this(rhs(p)).
  RigidTransform compose(const RigidTransform& rhs) const;
  /// Unit quaternion within tol, so the rotation part is orthonormal with det +1.
  bool is_rigid(double tol = 1e-9) const;
};

/// One world-space rigid transform per bone.
using Pose = std::vector<RigidTransform>;

inline Pose identity_pose(std::size_t bones) { return Pose(bones); }

struct HeatOptions {
  double heat_coefficient = 1.0;
  double min_distance = -1.0;  // world units; < 0 means half a voxel
  int max_influences = 4;
  int visibility_samples = 8;
};

/// The assembled equilibrium system (-L + H) W = H P and its solution, before
/// any clamping or pruning. Columns are bones.
struct HeatSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::MatrixXd rhs;
  Eigen::MatrixXd weights;
  std::vector<double> heat;  // diagonal of H
};

HeatSystem solve_heat_system(const TriangleMesh& mesh, const Skeleton& skeleton, const DistanceField& field,
                             const HeatOptions& options = {});

/// Clamp negatives, keep the largest max_influences per vertex, renormalize.
SkinBinding prune_weights(const Eigen::MatrixXd& raw, int max_influences);

SkinBinding compute_heat_weights(const TriangleMesh& mesh, const Skeleton& skeleton, const DistanceField& field,
                                 const HeatOptions& options = {});

/// v' = sum_i w_i (pose_i o rest_i^-1)(v)
TriangleMesh lbs_deform(const TriangleMesh& mesh, const SkinBinding& binding, const Pose& rest, const Pose& pose);

/// Each vertex follows its single bone rigidly.
TriangleMesh rigid_deform(const TriangleMesh& mesh, const SegmentBinding& binding, const Pose& rest,
                          const Pose& pose);

}  // namespace autorig
