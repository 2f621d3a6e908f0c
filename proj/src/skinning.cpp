#include "autorig/skinning.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include <Eigen/SparseCholesky>

namespace autorig {
namespace {

void check_pose_sizes(std::size_t bones, const Pose& rest, const Pose& pose) {
  if (rest.size() != bones || pose.size() != bones) {
    throw Error(ErrorCode::kBoneSetMismatch, "binding has " + std::to_string(bones) + " bones, rest pose " +
                                                 std::to_string(rest.size()) + ", pose " +
                                                 std::to_string(pose.size()));
  }
  for (const auto* p : {&rest, &pose}) {
    for (const auto& t : *p) {
      if (!t.is_rigid()) throw Error(ErrorCode::kContractViolation, "pose transform is not rigid");
    }
  }
}

std::vector<RigidTransform> bone_maps(const Pose& rest, const Pose& pose) {
  std::vector<RigidTransform> maps(rest.size());
  for (std::size_t b = 0; b < rest.size(); ++b) maps[b] = pose[b].compose(rest[b].inverse());
  return maps;
}

bool segment_inside(const DistanceField& field, const Vec3& from, const Vec3& to, int samples) {
  for (int s = 0; s < samples; ++s) {
    const double t = static_cast<double>(s + 1) / (samples + 1);
    try {
      if (!(query_distance(field, from + t * (to - from)) > 0.0)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

}  // namespace

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.conjugate();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

bool RigidTransform::is_rigid(double tol) const { return std::abs(rotation.norm() - 1.0) <= tol; }

HeatSystem solve_heat_system(const TriangleMesh& mesh, const Skeleton& skeleton, const DistanceField& field,
                             const HeatOptions& options) {
  if (!mesh.watertight) throw Error(ErrorCode::kNotWatertight, "heat weights need a watertight mesh");
  const auto bones = skeleton.bones();
  if (bones.empty()) throw Error(ErrorCode::kContractViolation, "skeleton has no bones");
  const int n = static_cast<int>(mesh.vertices.size());
  const int nb = static_cast<int>(bones.size());
  const double floor_d = options.min_distance >= 0.0 ? options.min_distance : 0.5 * field.cell_size();

  HeatSystem sys;
  sys.heat.assign(n, 0.0);
  sys.rhs = Eigen::MatrixXd::Zero(n, nb);
  std::vector<double> d(nb);
  std::vector<Vec3> closest(nb);
  for (int j = 0; j < n; ++j) {
    const Vec3& p = mesh.vertices[j];
    for (int b = 0; b < nb; ++b) {
      const Vec3& a = skeleton.joints[bones[b].parent].position;
      const Vec3& c = skeleton.joints[bones[b].joint].position;
      const auto sd = point_segment_distance(p, a, c);
      d[b] = sd.distance;
      closest[b] = a + sd.t * (c - a);
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> visible(nb, 0);
    for (int b = 0; b < nb; ++b) {
      visible[b] = segment_inside(field, p, closest[b], options.visibility_samples);
      if (visible[b]) best = std::min(best, d[b]);
    }
    if (!std::isfinite(best)) continue;  // no visible bone: heat arrives by diffusion only
    const double tol = 1e-9 * (1.0 + best);
    std::vector<int> nearest;
    for (int b = 0; b < nb; ++b) {
      if (visible[b] && d[b] <= best + tol) nearest.push_back(b);
    }
    const double dj = std::max(best, floor_d);
    sys.heat[j] = options.heat_coefficient / (dj * dj);
    for (int b : nearest) sys.rhs(j, b) = sys.heat[j] / static_cast<double>(nearest.size());
  }

  // -L + H with L the combinatorial Laplacian (L_jk = 1 per edge, L_jj = -degree).
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e];
      const int b = t[(e + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::vector<std::vector<int>> adjacency(n);
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> diag(sys.heat);
  for (const auto& [a, b] : edges) {
    triplets.emplace_back(a, b, -1.0);
    triplets.emplace_back(b, a, -1.0);
    diag[a] += 1.0;
    diag[b] += 1.0;
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  for (int j = 0; j < n; ++j) triplets.emplace_back(j, j, diag[j]);

  // Every connected component needs a heat source or the system is singular.
  std::vector<int> component(n, -1);
  int components = 0;
  for (int s = 0; s < n; ++s) {
    if (component[s] >= 0) continue;
    bool heated = false;
    std::deque<int> queue{s};
    component[s] = components;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      heated = heated || sys.heat[v] > 0.0;
      for (int w : adjacency[v]) {
        if (component[w] < 0) {
          component[w] = components;
          queue.push_back(w);
        }
      }
    }
    if (!heated) {
      throw Error(ErrorCode::kSingularSystem, "mesh component " + std::to_string(components) +
                                                  " (containing vertex " + std::to_string(s) +
                                                  ") sees no bone; heat system is singular");
    }
    ++components;
  }

  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sys.matrix);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kSingularSystem, "heat system factorization failed");
  sys.weights = solver.solve(sys.rhs);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kSingularSystem, "heat system solve failed");
  return sys;
}

SkinBinding prune_weights(const Eigen::MatrixXd& raw, int max_influences) {
  if (max_influences < 1) throw Error(ErrorCode::kOutOfRange, "max_influences must be >= 1");
  SkinBinding binding;
  binding.bone_count = static_cast<std::size_t>(raw.cols());
  binding.weights.resize(static_cast<std::size_t>(raw.rows()));
  std::vector<std::pair<int, double>> entries;
  for (Eigen::Index j = 0; j < raw.rows(); ++j) {
    entries.clear();
    for (Eigen::Index b = 0; b < raw.cols(); ++b) {
      const double w = std::max(0.0, raw(j, b));
      if (w > 0.0) entries.push_back({static_cast<int>(b), w});
    }
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (entries.size() > static_cast<std::size_t>(max_influences)) entries.resize(max_influences);
    if (entries.empty()) {
      // all raw weights non-positive: fall back to the largest raw entry
      Eigen::Index best = 0;
      raw.row(j).maxCoeff(&best);
      entries.push_back({static_cast<int>(best), 1.0});
    }
    double sum = 0.0;
    for (const auto& e : entries) sum += e.second;
    for (auto& e : entries) e.second /= sum;
    std::sort(entries.begin(), entries.end());
    binding.weights[j] = entries;
  }
  return binding;
}

SkinBinding compute_heat_weights(const TriangleMesh& mesh, const Skeleton& skeleton, const DistanceField& field,
                                 const HeatOptions& options) {
  const HeatSystem sys = solve_heat_system(mesh, skeleton, field, options);
  return prune_weights(sys.weights, options.max_influences);
}

TriangleMesh lbs_deform(const TriangleMesh& mesh, const SkinBinding& binding, const Pose& rest, const Pose& pose) {
  check_pose_sizes(binding.bone_count, rest, pose);
  if (binding.weights.size() != mesh.vertices.size()) {
    throw Error(ErrorCode::kBoneSetMismatch, "binding covers " + std::to_string(binding.weights.size()) +
                                                 " vertices, mesh has " + std::to_string(mesh.vertices.size()));
  }
  const auto maps = bone_maps(rest, pose);
  TriangleMesh out = mesh;
  for (std::size_t j = 0; j < mesh.vertices.size(); ++j) {
    Vec3 acc = Vec3::Zero();
    for (const auto& [b, w] : binding.weights[j]) {
      if (b < 0 || static_cast<std::size_t>(b) >= maps.size()) {
        throw Error(ErrorCode::kBoneSetMismatch, "weight references bone " + std::to_string(b));
      }
      acc += w * maps[b].apply(mesh.vertices[j]);
    }
    out.vertices[j] = acc;
  }
  return out;
}

TriangleMesh rigid_deform(const TriangleMesh& mesh, const SegmentBinding& binding, const Pose& rest,
                          const Pose& pose) {
  if (binding.vertex_bone.size() != mesh.vertices.size()) {
    throw Error(ErrorCode::kBoneSetMismatch, "binding covers " + std::to_string(binding.vertex_bone.size()) +
                                                 " vertices, mesh has " + std::to_string(mesh.vertices.size()));
  }
  check_pose_sizes(rest.size(), rest, pose);
  const auto maps = bone_maps(rest, pose);
  TriangleMesh out = mesh;
  for (std::size_t j = 0; j < mesh.vertices.size(); ++j) {
    const int b = binding.vertex_bone[j];
    if (b < 0 || static_cast<std::size_t>(b) >= maps.size()) {
      throw Error(ErrorCode::kBoneSetMismatch, "binding references bone " + std::to_string(b) + " but pose has " +
                                                   std::to_string(maps.size()));
    }
    out.vertices[j] = maps[b].apply(mesh.vertices[j]);
  }
  return out;
}

}  // namespace autorig
