#include "autorig/embed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace autorig {
namespace {

void check_gamma(const PenaltyModel& model) {
  if (model.gamma.size() != kFeatureCount) {
    throw Error(ErrorCode::kInvalidConfig, "gamma must have " + std::to_string(kFeatureCount) + " entries");
  }
  for (double g : model.gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw Error(ErrorCode::kInvalidConfig, "gamma entries must be non-negative");
  }
}

std::string size_report(const ReducedTemplate& tmpl, const EmbedGraph& graph) {
  std::size_t largest = 0;
  for (int c = 0; c < graph.component_count(); ++c) largest = std::max(largest, graph.component_size(c));
  return "template has " + std::to_string(tmpl.size()) + " joints; graph has " +
         std::to_string(graph.size()) + " vertices in " + std::to_string(graph.component_count()) +
         " component(s), largest " + std::to_string(largest);
}

// Terms of the penalty that only grow as joints are assigned: bone direction
// mismatch and extremity mismatch. Their weighted partial sum bounds the
// final penalty from below.
class PartialBound {
 public:
  PartialBound(const ReducedTemplate& tmpl, const EmbedGraph& graph, const PenaltyModel& model)
      : tmpl_(tmpl), graph_(graph) {
    direction_weight_ = model.gamma[1];
    extremity_weight_ = tmpl.extremity_count() ? model.gamma[2] / static_cast<double>(tmpl.extremity_count()) : 0.0;
  }

  double increment(int joint, int vertex, const std::vector<int>& assignment) const {
    double inc = 0.0;
    const auto& tj = tmpl_.joints()[joint];
    if (tj.parent >= 0) {
      const Vec3 d = graph_.vertices()[vertex] - graph_.vertices()[assignment[tj.parent]];
      const double len = d.norm();
      const double cosine = len > 0.0 ? d.dot(tmpl_.bone_direction(joint - 1)) / len : -1.0;
      inc += direction_weight_ * (1.0 - cosine);
    }
    if (tj.extremity && graph_.degree(vertex) > 1) inc += extremity_weight_;
    return inc;
  }

 private:
  const ReducedTemplate& tmpl_;
  const EmbedGraph& graph_;
  double direction_weight_ = 0.0;
  double extremity_weight_ = 0.0;
};

bool better(double p, const std::vector<int>& a, double best, const std::vector<int>& best_a) {
  if (best_a.empty()) return true;
  if (p != best) return p < best;
  return a < best_a;
}

}  // namespace

SpherePacking pack_spheres(const MedialSurface& dms, const DistanceField& field, double min_radius) {
  if (dms.voxels.empty()) throw Error(ErrorCode::kEmptyResult, "medial surface is empty; nothing to pack");
  const auto& grid = field.grid();
  struct Candidate {
    double radius;
    Voxel voxel;
    Vec3 center;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(dms.voxels.size());
  for (const auto& v : dms.voxels) {
    const Vec3 c = voxel_to_world(grid, v);
    candidates.push_back({query_distance(field, c), v, c});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.radius > b.radius; });
  SpherePacking packing;
  for (const auto& cand : candidates) {
    if (cand.radius < min_radius) break;
    const bool inside = std::any_of(packing.spheres.begin(), packing.spheres.end(), [&](const Sphere& s) {
      return (cand.center - s.center).norm() < s.radius;
    });
    if (!inside) packing.spheres.push_back({cand.center, cand.radius});
  }
  return packing;
}

EmbedGraph::EmbedGraph(std::vector<Vec3> vertices, std::vector<double> radii,
                       std::vector<std::pair<int, int>> edges)
    : vertices_(std::move(vertices)), radii_(std::move(radii)) {
  const int n = static_cast<int>(vertices_.size());
  if (radii_.size() != vertices_.size()) throw Error(ErrorCode::kContractViolation, "one radius per vertex");
  adjacency_.resize(n);
  for (auto [a, b] : edges) {
    if (a == b || a < 0 || b < 0 || a >= n || b >= n) {
      throw Error(ErrorCode::kContractViolation, "invalid graph edge");
    }
    if (a > b) std::swap(a, b);
    if (std::find(adjacency_[a].begin(), adjacency_[a].end(), b) != adjacency_[a].end()) {
      throw Error(ErrorCode::kContractViolation, "duplicate graph edge");
    }
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    edges_.push_back({a, b});
    edge_lengths_.push_back((vertices_[a] - vertices_[b]).norm());
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  component_.assign(n, -1);
  for (int s = 0; s < n; ++s) {
    if (component_[s] >= 0) continue;
    std::size_t count = 0;
    std::deque<int> queue{s};
    component_[s] = component_count_;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      ++count;
      for (int w : adjacency_[v]) {
        if (component_[w] < 0) {
          component_[w] = component_count_;
          queue.push_back(w);
        }
      }
    }
    component_sizes_.push_back(count);
    ++component_count_;
  }
}

EmbedGraph build_graph(const SpherePacking& packing, const DistanceField& field) {
  const auto& spheres = packing.spheres;
  std::vector<Vec3> centers;
  std::vector<double> radii;
  for (const auto& s : spheres) {
    centers.push_back(s.center);
    radii.push_back(s.radius);
  }
  std::vector<std::pair<int, int>> edges;
  for (std::size_t a = 0; a < spheres.size(); ++a) {
    for (std::size_t b = a + 1; b < spheres.size(); ++b) {
      const double d = (spheres[a].center - spheres[b].center).norm();
      if (!(d < spheres[a].radius + spheres[b].radius)) continue;
      const Vec3 mid = 0.5 * (spheres[a].center + spheres[b].center);
      if (query_distance(field, mid) > 0.0) edges.push_back({static_cast<int>(a), static_cast<int>(b)});
    }
  }
  return EmbedGraph(std::move(centers), std::move(radii), std::move(edges));
}

ReducedTemplate::ReducedTemplate(std::vector<TemplateJoint> joints) : joints_(std::move(joints)) {
  const int r = static_cast<int>(joints_.size());
  if (r < 2) throw Error(ErrorCode::kInvalidConfig, "template needs at least 2 joints");
  if (joints_[0].parent != -1) throw Error(ErrorCode::kInvalidConfig, "template joint 0 must be the root");
  std::vector<std::vector<int>> children(r);
  for (int j = 1; j < r; ++j) {
    const int p = joints_[j].parent;
    if (p < 0 || p >= j) {
      throw Error(ErrorCode::kInvalidConfig, "template joint '" + joints_[j].name + "' must follow its parent");
    }
    children[p].push_back(j);
    const Vec3 d = joints_[j].rest_position - joints_[p].rest_position;
    const double len = d.norm();
    if (!(len > 1e-12)) throw Error(ErrorCode::kInvalidConfig, "zero-length template bone at '" + joints_[j].name + "'");
    lengths_.push_back(len);
    directions_.push_back(d / len);
    total_length_ += len;
  }
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int j = queue.front();
    queue.pop_front();
    bfs_order_.push_back(j);
    for (int c : children[j]) queue.push_back(c);
  }
  std::map<int, std::vector<int>> groups;
  for (int j = 0; j < r; ++j) {
    if (joints_[j].extremity) ++extremity_count_;
    if (joints_[j].symmetry >= 0) groups[joints_[j].symmetry].push_back(j);
  }
  for (const auto& [id, members] : groups) {
    if (members.size() != 2 || members[0] == 0) {
      throw Error(ErrorCode::kInvalidConfig, "symmetry id " + std::to_string(id) + " must name exactly two non-root joints");
    }
    symmetry_pairs_.push_back({members[0], members[1]});
  }
}

ReducedTemplate biped_template() {
  return ReducedTemplate({
      {"pelvis", -1, Vec3(0.0, 1.0, 0.0), false, -1},
      {"chest", 0, Vec3(0.0, 1.5, 0.0), false, -1},
      {"head", 1, Vec3(0.0, 1.9, 0.0), true, -1},
      {"left_hand", 1, Vec3(0.75, 1.5, 0.0), true, 0},
      {"right_hand", 1, Vec3(-0.75, 1.5, 0.0), true, 0},
      {"left_foot", 0, Vec3(0.2, 0.0, 0.0), true, 1},
      {"right_foot", 0, Vec3(-0.2, 0.0, 0.0), true, 1},
  });
}

ReducedTemplate quadruped_template() {
  return ReducedTemplate({
      {"hips", -1, Vec3(-0.5, 1.0, 0.0), false, -1},
      {"chest", 0, Vec3(0.5, 1.0, 0.0), false, -1},
      {"neck", 1, Vec3(0.8, 1.4, 0.0), false, -1},
      {"head", 2, Vec3(1.1, 1.6, 0.0), true, -1},
      {"tail", 0, Vec3(-1.1, 1.1, 0.0), true, -1},
      {"front_left_foot", 1, Vec3(0.5, 0.0, 0.25), true, 0},
      {"front_right_foot", 1, Vec3(0.5, 0.0, -0.25), true, 0},
      {"back_left_foot", 0, Vec3(-0.5, 0.0, 0.25), true, 1},
      {"back_right_foot", 0, Vec3(-0.5, 0.0, -0.25), true, 1},
  });
}

PenaltyModel PenaltyModel::neutral() {
  return {std::vector<double>(kFeatureCount, 1.0 / std::sqrt(static_cast<double>(kFeatureCount)))};
}

bool is_feasible(const std::vector<int>& assignment, const ReducedTemplate& tmpl, const EmbedGraph& graph) {
  if (assignment.size() != tmpl.size()) return false;
  const int n = static_cast<int>(graph.size());
  for (std::size_t a = 0; a < assignment.size(); ++a) {
    if (assignment[a] < 0 || assignment[a] >= n) return false;
    for (std::size_t b = 0; b < a; ++b) {
      if (assignment[a] == assignment[b]) return false;
    }
  }
  const int comp = graph.components()[assignment[0]];
  return std::all_of(assignment.begin(), assignment.end(),
                     [&](int v) { return graph.components()[v] == comp; });
}

FeatureVector embedding_features(const std::vector<int>& assignment, const ReducedTemplate& tmpl,
                                 const EmbedGraph& graph) {
  if (!is_feasible(assignment, tmpl, graph)) {
    throw Error(ErrorCode::kInfeasibleEmbedding, "embedding assigns repeated or disconnected vertices");
  }
  const auto& x = graph.vertices();
  const std::size_t nb = tmpl.bone_count();
  thread_local std::vector<double> len;
  len.resize(nb);
  double total = 0.0;
  FeatureVector f{};
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& j = tmpl.joints()[b + 1];
    const Vec3 d = x[assignment[b + 1]] - x[assignment[j.parent]];
    len[b] = d.norm();
    total += len[b];
    f[1] += 1.0 - d.dot(tmpl.bone_direction(b)) / len[b];
  }
  for (std::size_t b = 0; b < nb; ++b) {
    f[0] += std::abs(len[b] / total - tmpl.bone_length(b) / tmpl.total_length());
  }
  if (tmpl.extremity_count() > 0) {
    std::size_t bad = 0;
    for (std::size_t j = 0; j < tmpl.size(); ++j) {
      if (tmpl.joints()[j].extremity && graph.degree(assignment[j]) > 1) ++bad;
    }
    f[2] = static_cast<double>(bad) / static_cast<double>(tmpl.extremity_count());
  }
  for (const auto& [a, b] : tmpl.symmetry_pairs()) f[3] += std::abs(len[a - 1] - len[b - 1]) / total;
  const double tau = 0.5 * total / static_cast<double>(nb);
  for (std::size_t a = 0; a < tmpl.size(); ++a) {
    for (std::size_t b = a + 1; b < tmpl.size(); ++b) {
      const double d = (x[assignment[a]] - x[assignment[b]]).norm();
      f[4] += std::max(0.0, tau - d) / tau;
    }
  }
  return f;
}

double penalty(const std::vector<int>& assignment, const ReducedTemplate& tmpl, const EmbedGraph& graph,
               const PenaltyModel& model) {
  check_gamma(model);
  const FeatureVector f = embedding_features(assignment, tmpl, graph);
  double p = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) p += model.gamma[i] * f[i];
  return p;
}

double embedding_margin(const std::vector<double>& gamma, const std::vector<std::vector<double>>& good,
                        const std::vector<std::vector<double>>& bad) {
  auto min_dot = [&](const std::vector<std::vector<double>>& set) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : set) m = std::min(m, std::inner_product(v.begin(), v.end(), gamma.begin(), 0.0));
    return m;
  };
  return min_dot(bad) - min_dot(good);
}

GammaFit learn_gamma(const std::vector<std::vector<double>>& good, const std::vector<std::vector<double>>& bad,
                     std::uint64_t seed, int starts) {
  if (good.empty() || bad.empty()) throw Error(ErrorCode::kInvalidConfig, "need at least one good and one bad feature vector");
  const std::size_t k = good.front().size();
  if (k == 0) throw Error(ErrorCode::kInvalidConfig, "feature vectors are empty");
  for (const auto* set : {&good, &bad}) {
    for (const auto& v : *set) {
      if (v.size() != k) throw Error(ErrorCode::kInvalidConfig, "feature vectors differ in length");
      for (double x : v) {
        if (!(x >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "feature vectors must be non-negative");
      }
    }
  }

  GammaFit fit;
  {
    auto a = good;
    auto b = bad;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    if (a == b) {
      fit.gamma.assign(k, 1.0 / std::sqrt(static_cast<double>(k)));
      fit.margin = embedding_margin(fit.gamma, good, bad);
      fit.degenerate = true;
      return fit;
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto project = [&](std::vector<double>& g) {
    double n2 = 0.0;
    for (auto& x : g) {
      x = std::max(0.0, x);
      n2 += x * x;
    }
    if (!(n2 > 0.0)) return false;
    const double n = std::sqrt(n2);
    for (auto& x : g) x /= n;
    return true;
  };

  std::vector<std::vector<double>> initial;
  for (int s = 0; s < starts; ++s) {
    std::vector<double> g(k);
    do {
      for (auto& x : g) x = std::abs(normal(rng));
    } while (!project(g));
    initial.push_back(std::move(g));
  }
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> axis(k, 0.0);
    axis[i] = 1.0;
    initial.push_back(std::move(axis));
  }
  initial.push_back(std::vector<double>(k, 1.0 / std::sqrt(static_cast<double>(k))));

  fit.margin = -std::numeric_limits<double>::infinity();
  std::vector<double> trial(k);
  for (auto g : initial) {
    double current = embedding_margin(g, good, bad);
    double step = 0.5;
    while (step > 1e-10) {
      bool improved = false;
      // coordinate moves, then random directions
      for (std::size_t d = 0; d < 4 * k; ++d) {
        if (d < 2 * k) {
          trial = g;
          trial[d / 2] += (d % 2 ? -step : step);
        } else {
          for (std::size_t i = 0; i < k; ++i) trial[i] = g[i] + step * normal(rng);
        }
        if (!project(trial)) continue;
        const double m = embedding_margin(trial, good, bad);
        if (m > current) {
          current = m;
          g = trial;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    if (current > fit.margin) {
      fit.margin = current;
      fit.gamma = g;
    }
  }
  return fit;
}

Embedding embed_template(const ReducedTemplate& tmpl, const EmbedGraph& graph, const PenaltyModel& model, int beam) {
  check_gamma(model);
  if (beam < 0) throw Error(ErrorCode::kInvalidConfig, "beam must be >= 0 (0 = exhaustive)");
  const int r = static_cast<int>(tmpl.size());
  const int n = static_cast<int>(graph.size());
  std::vector<int> roots;
  for (int v = 0; v < n; ++v) {
    if (graph.component_size(graph.components()[v]) >= static_cast<std::size_t>(r)) roots.push_back(v);
  }
  if (r > n || roots.empty()) throw Error(ErrorCode::kInfeasibleEmbedding, size_report(tmpl, graph));
  std::vector<char> root_ok(n, 0);
  for (int v : roots) root_ok[v] = 1;

  const PartialBound bound(tmpl, graph, model);
  const auto& order = tmpl.bfs_order();
  Embedding best;
  double best_penalty = std::numeric_limits<double>::infinity();

  if (beam == kExhaustive) {
    std::vector<int> assignment(r, -1);
    std::vector<char> used(n, 0);
    auto dfs = [&](auto&& self, int level, double lb) -> void {
      if (level == r) {
        const double p = penalty(assignment, tmpl, graph, model);
        if (better(p, assignment, best_penalty, best.assignment)) {
          best_penalty = p;
          best.assignment = assignment;
        }
        return;
      }
      const int joint = order[level];
      const int comp = level == 0 ? -1 : graph.components()[assignment[0]];
      for (int v = 0; v < n; ++v) {
        if (used[v]) continue;
        if (comp >= 0 ? graph.components()[v] != comp : !root_ok[v]) continue;
        const double next = lb + bound.increment(joint, v, assignment);
        if (next > best_penalty + 1e-12 * (1.0 + std::abs(best_penalty))) continue;
        used[v] = 1;
        assignment[joint] = v;
        self(self, level + 1, next);
        assignment[joint] = -1;
        used[v] = 0;
      }
    };
    dfs(dfs, 0, 0.0);
  } else {
    struct State {
      std::vector<int> assignment;
      std::vector<int> sequence;  // vertices in BFS order, for tie-breaking
      double bound = 0.0;
    };
    std::vector<State> states;
    for (int v : roots) {
      State s;
      s.assignment.assign(r, -1);
      s.assignment[order[0]] = v;
      s.sequence = {v};
      s.bound = bound.increment(order[0], v, s.assignment);
      states.push_back(std::move(s));
    }
    auto rank = [](const State& a, const State& b) {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.sequence < b.sequence;
    };
    auto trim = [&](std::vector<State>& list) {
      std::sort(list.begin(), list.end(), rank);
      if (list.size() > static_cast<std::size_t>(beam)) list.resize(beam);
    };
    trim(states);
    for (int level = 1; level < r; ++level) {
      const int joint = order[level];
      std::vector<State> next;
      for (const auto& s : states) {
        const int comp = graph.components()[s.assignment[order[0]]];
        for (int v = 0; v < n; ++v) {
          if (graph.components()[v] != comp) continue;
          if (std::find(s.sequence.begin(), s.sequence.end(), v) != s.sequence.end()) continue;
          State t = s;
          t.assignment[joint] = v;
          t.sequence.push_back(v);
          t.bound += bound.increment(joint, v, s.assignment);
          next.push_back(std::move(t));
        }
      }
      trim(next);
      states = std::move(next);
    }
    for (const auto& s : states) {
      const double p = penalty(s.assignment, tmpl, graph, model);
      if (better(p, s.assignment, best_penalty, best.assignment)) {
        best_penalty = p;
        best.assignment = s.assignment;
      }
    }
  }
  if (best.assignment.empty()) throw Error(ErrorCode::kInfeasibleEmbedding, size_report(tmpl, graph));
  best.penalty = best_penalty;
  return best;
}

double refinement_energy(const std::vector<Vec3>& positions, const ReducedTemplate& tmpl,
                         const DistanceField& field, double scale, double clearance_weight) {
  double e = 0.0;
  for (std::size_t b = 0; b < tmpl.bone_count(); ++b) {
    const int j = static_cast<int>(b) + 1;
    const double len = (positions[j] - positions[tmpl.joints()[j].parent]).norm();
    const double target = scale * tmpl.bone_length(b) / tmpl.total_length();
    e += (len - target) * (len - target) / (scale * scale);
  }
  for (const auto& p : positions) e -= clearance_weight * query_distance(field, p) / scale;
  return e;
}

Skeleton refine_embedding(const Embedding& embedding, const EmbedGraph& graph, const DistanceField& field,
                          const ReducedTemplate& tmpl, const RefineOptions& options) {
  if (!is_feasible(embedding.assignment, tmpl, graph)) {
    throw Error(ErrorCode::kInfeasibleEmbedding, "cannot refine an infeasible embedding");
  }
  const std::size_t r = tmpl.size();
  std::vector<Vec3> x(r);
  for (std::size_t j = 0; j < r; ++j) x[j] = graph.vertices()[embedding.assignment[j]];
  double scale = 0.0;
  for (std::size_t j = 1; j < r; ++j) scale += (x[j] - x[tmpl.joints()[j].parent]).norm();

  const auto& spec = field.grid().spec();
  const Vec3 lo = spec.origin;
  const Vec3 hi = spec.origin + Vec3(spec.dims[0], spec.dims[1], spec.dims[2]) * spec.cell_size;
  auto admissible = [&](std::size_t j, const Vec3& p) {
    if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any()) return false;
    if (!(query_distance(field, p) > 0.0)) return false;
    for (std::size_t k = 0; k < r; ++k) {
      if (k == j) continue;
      const bool adjacent = tmpl.joints()[k].parent == static_cast<int>(j) || tmpl.joints()[j].parent == static_cast<int>(k);
      if (adjacent && (x[k] - p).norm() < 1e-9) return false;
    }
    return true;
  };

  double energy = refinement_energy(x, tmpl, field, scale, options.clearance_weight);
  double step = 0.5 * spec.cell_size;
  const Vec3 dirs[6] = {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
  for (int it = 0; it < options.iterations && step > 1e-3 * spec.cell_size; ++it) {
    bool improved = false;
    for (std::size_t j = 0; j < r; ++j) {
      for (const auto& d : dirs) {
        const Vec3 candidate = x[j] + step * d;
        if (!admissible(j, candidate)) continue;
        const Vec3 saved = x[j];
        x[j] = candidate;
        const double e = refinement_energy(x, tmpl, field, scale, options.clearance_weight);
        if (e < energy - 1e-15) {
          energy = e;
          improved = true;
        } else {
          x[j] = saved;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  Skeleton skeleton;
  for (std::size_t j = 0; j < r; ++j) skeleton.joints.push_back({tmpl.joints()[j].name, tmpl.joints()[j].parent, x[j]});
  validate_skeleton(skeleton);
  return skeleton;
}

}  // namespace autorig
