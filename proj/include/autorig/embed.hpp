#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "autorig/ctrlskel.hpp"
#include "autorig/distfield.hpp"
#include "autorig/medial.hpp"

namespace autorig {

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Greedy packing, radii non-increasing; no center lies strictly inside
/// another sphere.
struct SpherePacking {
  std::vector<Sphere> spheres;
};

SpherePacking pack_spheres(const MedialSurface& dms, const DistanceField& field, double min_radius);

class EmbedGraph {
 public:
  EmbedGraph() = default;
  /// Throws kContractViolation on self-loops, duplicate or out-of-range edges.
  EmbedGraph(std::vector<Vec3> vertices, std::vector<double> radii,
             std::vector<std::pair<int, int>> edges);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<double>& edge_lengths() const { return edge_lengths_; }
  const std::vector<int>& neighbors(int v) const { return adjacency_[v]; }
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }
  /// Connected component id per vertex, numbered in order of lowest vertex.
  const std::vector<int>& components() const { return component_; }
  int component_count() const { return component_count_; }
  std::size_t component_size(int id) const { return component_sizes_[id]; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<double> radii_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> edge_lengths_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> component_;
  std::vector<std::size_t> component_sizes_;
  int component_count_ = 0;
};

/// Connects intersecting spheres whose center-to-center midpoint lies inside
/// the shape.
EmbedGraph build_graph(const SpherePacking& packing, const DistanceField& field);

struct TemplateJoint {
  std::string name;
  int parent = -1;
  Vec3 rest_position = Vec3::Zero();
  bool extremity = false;
  int symmetry = -1;  // joints sharing a non-negative id are mirror pairs
};

/// Reduced skeleton to embed. Joint 0 is the root and parents precede children.
class ReducedTemplate {
 public:
  ReducedTemplate() = default;
  explicit ReducedTemplate(std::vector<TemplateJoint> joints);

  std::size_t size() const { return joints_.size(); }
  const std::vector<TemplateJoint>& joints() const { return joints_; }
  /// Bone b ends at joint b + 1.
  std::size_t bone_count() const { return joints_.size() - 1; }
  double bone_length(std::size_t b) const { return lengths_[b]; }
  double total_length() const { return total_length_; }
  const Vec3& bone_direction(std::size_t b) const { return directions_[b]; }
  /// Joints in breadth-first order from the root.
  const std::vector<int>& bfs_order() const { return bfs_order_; }
  std::size_t extremity_count() const { return extremity_count_; }
  const std::vector<std::pair<int, int>>& symmetry_pairs() const { return symmetry_pairs_; }

 private:
  std::vector<TemplateJoint> joints_;
  std::vector<double> lengths_;
  std::vector<Vec3> directions_;
  double total_length_ = 0.0;
  std::vector<int> bfs_order_;
  std::size_t extremity_count_ = 0;
  std::vector<std::pair<int, int>> symmetry_pairs_;
};

/// 7 joints: pelvis, chest, head, two hands, two feet (y up, x to the model's left).
ReducedTemplate biped_template();
/// 9 joints: hips, chest, neck, head, tail, four feet (x forward, y up).
ReducedTemplate quadruped_template();

/// Embedding quality features, all non-negative and scale-free:
///   0 bone-length ratio mismatch, 1 bone direction mismatch (1 - cos),
///   2 extremities on non-leaf vertices, 3 mirror-pair length asymmetry,
///   4 crowding of joints closer than half the mean bone length.
inline constexpr std::size_t kFeatureCount = 5;
using FeatureVector = std::array<double, kFeatureCount>;

struct PenaltyModel {
  std::vector<double> gamma;

  /// All-ones weights, normalized.
  static PenaltyModel neutral();
};

struct Embedding {
  std::vector<int> assignment;  // template joint -> graph vertex
  double penalty = 0.0;
};

/// Distinct vertices, all inside one connected component.
bool is_feasible(const std::vector<int>& assignment, const ReducedTemplate& tmpl, const EmbedGraph& graph);

/// Throws kInfeasibleEmbedding for infeasible assignments.
FeatureVector embedding_features(const std::vector<int>& assignment, const ReducedTemplate& tmpl,
                                 const EmbedGraph& graph);

double penalty(const std::vector<int>& assignment, const ReducedTemplate& tmpl, const EmbedGraph& graph,
               const PenaltyModel& model);

/// margin(gamma) = min_i gamma.q_i - min_j gamma.p_j
double embedding_margin(const std::vector<double>& gamma, const std::vector<std::vector<double>>& good,
                        const std::vector<std::vector<double>>& bad);

struct GammaFit {
  std::vector<double> gamma;
  double margin = 0.0;
  bool degenerate = false;  // good and bad sets coincide; every gamma has margin 0
};

/// Maximizes the margin over non-negative unit vectors with multi-start
/// projected hill climbing.
GammaFit learn_gamma(const std::vector<std::vector<double>>& good, const std::vector<std::vector<double>>& bad,
                     std::uint64_t seed = 0, int starts = 64);

/// beam == kExhaustive searches every feasible assignment (with bound pruning).
inline constexpr int kExhaustive = 0;

/// Joint-by-joint partial-embedding search in template BFS order. Ties in
/// penalty go to the lexicographically smaller assignment.
Embedding embed_template(const ReducedTemplate& tmpl, const EmbedGraph& graph, const PenaltyModel& model,
                         int beam = 512);

struct RefineOptions {
  int iterations = 30;
  double clearance_weight = 1.0;
};

/// Continuous coordinate descent on joint positions: keeps bone-length ratios
/// close to the template while pushing joints toward the medial core.
Skeleton refine_embedding(const Embedding& embedding, const EmbedGraph& graph, const DistanceField& field,
                          const ReducedTemplate& tmpl, const RefineOptions& options = {});

/// The objective refine_embedding() descends, for a given set of joint positions.
double refinement_energy(const std::vector<Vec3>& positions, const ReducedTemplate& tmpl,
                         const DistanceField& field, double scale, double clearance_weight);

}  // namespace autorig
