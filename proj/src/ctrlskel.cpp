#include "autorig/ctrlskel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace autorig {

std::vector<Bone> Skeleton::bones() const {
  std::vector<Bone> out;
  for (std::size_t j = 1; j < joints.size(); ++j) out.push_back({static_cast<int>(j), joints[j].parent});
  return out;
}

std::vector<int> Skeleton::joint_depths() const {
  std::vector<int> depth(joints.size(), 0);
  for (std::size_t j = 1; j < joints.size(); ++j) depth[j] = depth[joints[j].parent] + 1;
  return depth;
}

void validate_skeleton(const Skeleton& skeleton) {
  const auto& joints = skeleton.joints;
  if (joints.empty()) throw Error(ErrorCode::kContractViolation, "skeleton has no joints");
  if (joints[0].parent != -1) throw Error(ErrorCode::kContractViolation, "joint 0 must be the root");
  for (std::size_t j = 1; j < joints.size(); ++j) {
    const int p = joints[j].parent;
    if (p < 0 || p >= static_cast<int>(j)) {
      throw Error(ErrorCode::kContractViolation,
                  "joint " + std::to_string(j) + " has parent " + std::to_string(p) +
                      "; parents must precede children and only joint 0 may be a root");
    }
    if ((joints[j].position - joints[p].position).norm() < 1e-9) {
      throw Error(ErrorCode::kContractViolation, "zero-length bone ending at joint " + std::to_string(j));
    }
  }
}

double segment_error(const std::vector<Vec3>& points, int a, int b) {
  double worst = 0.0;
  for (int n = a + 1; n < b; ++n) {
    worst = std::max(worst, point_segment_distance(points[n], points[a], points[b]).distance);
  }
  return worst;
}

ChainSplit split_chain(const std::vector<Vec3>& points, int max_segments, double max_error) {
  if (points.size() < 2) throw Error(ErrorCode::kContractViolation, "chain needs at least 2 points");
  if (max_segments < 1) throw Error(ErrorCode::kOutOfRange, "max_segments must be >= 1");
  struct Segment {
    int a;
    int b;
    double error;
  };
  std::vector<Segment> segments{{0, static_cast<int>(points.size()) - 1, 0.0}};
  segments[0].error = segment_error(points, segments[0].a, segments[0].b);

  ChainSplit out;
  auto overall = [&] {
    double e = 0.0;
    for (const auto& s : segments) e = std::max(e, s.error);
    return e;
  };
  out.max_error.push_back(overall());
  while (static_cast<int>(segments.size()) < max_segments && overall() > max_error) {
    // segments stay ordered along the chain, so ties go to the earliest one
    std::size_t worst = 0;
    for (std::size_t s = 1; s < segments.size(); ++s) {
      if (segments[s].error > segments[worst].error) worst = s;
    }
    const Segment seg = segments[worst];
    if (seg.b - seg.a < 2) break;
    int best_split = -1;
    double best_err = std::numeric_limits<double>::infinity();
    double best_left = 0.0;
    double best_right = 0.0;
    for (int m = seg.a + 1; m < seg.b; ++m) {
      const double left = segment_error(points, seg.a, m);
      const double right = segment_error(points, m, seg.b);
      const double e = std::max(left, right);
      if (e < best_err) {
        best_err = e;
        best_split = m;
        best_left = left;
        best_right = right;
      }
    }
    segments[worst] = {seg.a, best_split, best_left};
    segments.insert(segments.begin() + static_cast<long>(worst) + 1, {best_split, seg.b, best_right});
    out.order.push_back(best_split);
    out.max_error.push_back(overall());
  }
  out.indices = out.order;
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

Skeleton build_skeleton(const PathTree& tree, const std::vector<SmoothChain>& chains,
                        const std::vector<ChainSplit>& splits, const DistanceField& field) {
  const auto& grid = field.grid();
  const std::size_t n_chains = tree.chains.size();
  if (chains.size() != n_chains || splits.size() != n_chains) {
    throw Error(ErrorCode::kInconsistentAttachment, "chain, smooth chain and split counts differ");
  }

  // Voxel ownership: heart -> (-1, 0); every chain voxel except its meeting
  // voxel -> (chain, index).
  std::map<Voxel, std::pair<int, int>> owner;
  owner[tree.root.voxel] = {-1, 0};
  std::vector<std::vector<int>> joint_indices(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) {
    const auto& voxels = tree.chains[c].voxels;
    if (voxels.size() < 2 || chains[c].points.size() != voxels.size()) {
      throw Error(ErrorCode::kInconsistentAttachment, "chain " + std::to_string(c) + " is malformed");
    }
    for (int idx : splits[c].indices) {
      if (idx <= 0 || idx >= static_cast<int>(voxels.size()) - 1) {
        throw Error(ErrorCode::kInconsistentAttachment, "split index outside chain " + std::to_string(c));
      }
    }
    joint_indices[c] = splits[c].indices;
    joint_indices[c].push_back(0);
  }

  // Pass 1: resolve where each chain attaches, adding joints to earlier chains
  // when the meeting point is not near any joint.
  std::vector<std::pair<int, int>> attach(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) {
    const auto& voxels = tree.chains[c].voxels;
    const Voxel meet = voxels.back();
    const auto it = owner.find(meet);
    if (it == owner.end()) {
      throw Error(ErrorCode::kInconsistentAttachment,
                  "chain " + std::to_string(c) + " ends off the existing tree");
    }
    std::pair<int, int> best{-2, 0};
    std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
    auto consider = [&](int chain, int index, const Voxel& at) {
      const std::int64_t d2 = static_cast<std::int64_t>(at[0] - meet[0]) * (at[0] - meet[0]) +
                              static_cast<std::int64_t>(at[1] - meet[1]) * (at[1] - meet[1]) +
                              static_cast<std::int64_t>(at[2] - meet[2]) * (at[2] - meet[2]);
      if (d2 <= field.squared(at) && d2 < best_d2) {
        best_d2 = d2;
        best = {chain, index};
      }
    };
    consider(-1, 0, tree.root.voxel);
    for (std::size_t e = 0; e < c; ++e) {
      for (int idx : joint_indices[e]) consider(static_cast<int>(e), idx, tree.chains[e].voxels[idx]);
    }
    if (best.first == -2) {
      best = it->second;
      auto& js = joint_indices[best.first];
      if (std::find(js.begin(), js.end(), best.second) == js.end()) js.push_back(best.second);
    }
    attach[c] = best;
    for (std::size_t n = 0; n + 1 < voxels.size(); ++n) owner.emplace(voxels[n], std::pair<int, int>(static_cast<int>(c), static_cast<int>(n)));
  }

  // Pass 2: emit joints chain by chain, from the meeting end toward the tip.
  Skeleton skeleton;
  skeleton.joints.push_back({"root", -1, voxel_to_world(grid, tree.root.voxel)});
  std::map<std::pair<int, int>, int> joint_of;
  joint_of[{-1, 0}] = 0;
  for (std::size_t c = 0; c < n_chains; ++c) {
    auto indices = joint_indices[c];
    std::sort(indices.begin(), indices.end(), std::greater<>());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    int parent = joint_of.at(attach[c]);
    int count = 0;
    for (int idx : indices) {
      const Vec3& pos = chains[c].points[idx];
      if ((pos - skeleton.joints[parent].position).norm() < 1e-9) {
        joint_of[{static_cast<int>(c), idx}] = parent;
        continue;
      }
      const int id = static_cast<int>(skeleton.joints.size());
      skeleton.joints.push_back(
          {"chain" + std::to_string(c) + "_" + std::to_string(count++), parent, pos});
      joint_of[{static_cast<int>(c), idx}] = id;
      parent = id;
    }
  }
  validate_skeleton(skeleton);
  return skeleton;
}

std::vector<std::vector<int>> SegmentBinding::bone_vertices(std::size_t bone_count) const {
  std::vector<std::vector<int>> out(bone_count);
  for (std::size_t v = 0; v < vertex_bone.size(); ++v) out[vertex_bone[v]].push_back(static_cast<int>(v));
  return out;
}

SegmentBinding bind_segments(const TriangleMesh& mesh, const Skeleton& skeleton) {
  const auto bones = skeleton.bones();
  if (bones.empty()) throw Error(ErrorCode::kContractViolation, "skeleton has no bones");
  const auto depth = skeleton.joint_depths();
  SegmentBinding binding;
  binding.vertex_bone.resize(mesh.vertices.size(), 0);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < bones.size(); ++b) {
      const double d = point_segment_distance(mesh.vertices[v], skeleton.joints[bones[b].parent].position,
                                              skeleton.joints[bones[b].joint].position)
                           .distance;
      const double tol = 1e-12 * (1.0 + best_d);
      if (best < 0 || d < best_d - tol) {
        best = static_cast<int>(b);
        best_d = d;
      } else if (d <= best_d + tol && depth[bones[b].joint] < depth[bones[best].joint]) {
        best = static_cast<int>(b);
        best_d = std::min(best_d, d);
      }
    }
    binding.vertex_bone[v] = best;
  }
  return binding;
}

}  // namespace autorig
