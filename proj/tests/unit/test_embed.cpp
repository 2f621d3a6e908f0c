#include <doctest.h>

#include <cmath>
#include <random>

#include "autorig/embed.hpp"
#include "autorig/pipeline.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace autorig;

namespace {

std::vector<Voxel> block(Voxel lo, Voxel hi) {
  std::vector<Voxel> out;
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) out.push_back({i, j, k});
  return out;
}

ReducedTemplate two_joint() {
  return ReducedTemplate({{"a", -1, Vec3::Zero(), false, -1}, {"b", 0, Vec3::UnitX(), true, -1}});
}

void check_packing(const SpherePacking& p, const DistanceField& f) {
  for (std::size_t a = 0; a < p.spheres.size(); ++a) {
    CHECK(p.spheres[a].radius == query_distance(f, p.spheres[a].center));
    if (a > 0) CHECK(p.spheres[a].radius <= p.spheres[a - 1].radius);
    for (std::size_t b = 0; b < p.spheres.size(); ++b) {
      if (a != b) CHECK((p.spheres[a].center - p.spheres[b].center).norm() >= p.spheres[b].radius);
    }
  }
}

void check_graph(const EmbedGraph& g, const DistanceField& f) {
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto [a, b] = g.edges()[e];
    CHECK(a != b);
    CHECK(g.edge_lengths()[e] < g.radii()[a] + g.radii()[b]);
    CHECK(query_distance(f, 0.5 * (g.vertices()[a] + g.vertices()[b])) > 0.0);
  }
}

}  // namespace

TEST_CASE("cube packing starts at the center") {
  const auto f = compute_edm(fixtures::box_grid({11, 11, 11}, block({1, 1, 1}, {9, 9, 9})));
  const auto dms = extract_dms(f, 1.0);
  const auto p = pack_spheres(dms, f, 1.0);
  REQUIRE_FALSE(p.spheres.empty());
  CHECK((p.spheres[0].center - Vec3(5.5, 5.5, 5.5)).norm() < 1e-12);
  CHECK(std::abs(p.spheres[0].radius - 4.5) <= 1.0);
  check_packing(p, f);
  CHECK(pack_spheres(dms, f, f.max_dist() + 0.1).spheres.empty());
  CHECK_THROWS_AS(pack_spheres(MedialSurface{}, f, 1.0), Error);
}

TEST_CASE("two blobs") {
  auto solid = block({1, 1, 1}, {5, 5, 5});
  const auto other = block({9, 1, 1}, {13, 5, 5});
  solid.insert(solid.end(), other.begin(), other.end());
  const auto f = compute_edm(fixtures::box_grid({15, 7, 7}, solid));
  const auto p = pack_spheres(extract_dms(f, 1.0), f, 1.0);
  bool left = false, right = false;
  for (const auto& s : p.spheres) (s.center.x() < 7 ? left : right) = true;
  CHECK(left);
  CHECK(right);
  check_packing(p, f);
  const auto g = build_graph(p, f);
  check_graph(g, f);
  CHECK(g.component_count() >= 2);
}

TEST_CASE("graph edges") {
  const auto f = compute_edm(fixtures::box_grid({20, 7, 7}, block({1, 1, 1}, {18, 5, 5})));
  SpherePacking rod{{{Vec3(4.5, 3.5, 3.5), 2.0}, {Vec3(7.5, 3.5, 3.5), 2.0}}};
  const auto g = build_graph(rod, f);
  CHECK(g.edges().size() == 1);
  CHECK(g.edge_lengths()[0] == doctest::Approx(3.0));

  auto solid = block({1, 1, 1}, {5, 5, 5});
  const auto other = block({9, 1, 1}, {13, 5, 5});
  solid.insert(solid.end(), other.begin(), other.end());
  const auto f2 = compute_edm(fixtures::box_grid({15, 7, 7}, solid));
  SpherePacking apart{{{Vec3(4.5, 3.5, 3.5), 3.0}, {Vec3(9.5, 3.5, 3.5), 3.0}}};
  CHECK(build_graph(apart, f2).edges().empty());

  CHECK_THROWS_AS(EmbedGraph({Vec3::Zero(), Vec3::UnitX()}, {1, 1}, {{0, 0}}), Error);
  CHECK_THROWS_AS(EmbedGraph({Vec3::Zero(), Vec3::UnitX()}, {1, 1}, {{0, 1}, {1, 0}}), Error);
  CHECK_THROWS_AS(EmbedGraph({Vec3::Zero(), Vec3::UnitX()}, {1, 1}, {{0, 2}}), Error);
}

TEST_CASE("star mesh graph is connected") {
  const auto f = compute_edm(voxelize(fixtures::star_mesh(), 48));
  const auto dms = extract_dms(f, 2.0);
  const auto p = pack_spheres(dms, f, 2.0 * f.cell_size());
  check_packing(p, f);
  const auto g = build_graph(p, f);
  check_graph(g, f);
  CHECK(g.component_count() == 1);
}

TEST_CASE("templates") {
  const auto biped = biped_template();
  CHECK(biped.size() == 7);
  CHECK(biped.extremity_count() == 5);
  CHECK(biped.symmetry_pairs().size() == 2);
  CHECK(quadruped_template().size() == 9);
  CHECK(biped.bfs_order().front() == 0);
  CHECK_THROWS_AS(ReducedTemplate({{"a", -1, Vec3::Zero(), false, -1}}), Error);
  CHECK_THROWS_AS(ReducedTemplate({{"a", -1, Vec3::Zero(), false, -1}, {"b", 1, Vec3::UnitX(), false, -1}}), Error);
}

TEST_CASE("penalty basics") {
  const auto g = fixtures::humanoid_graph();
  const auto t = biped_template();
  // pelvis, chest, head, hands and feet sit on the template rest pose
  const std::vector<int> exact{0, 2, 4, 6, 8, 10, 12};
  const auto f = embedding_features(exact, t, g);
  CHECK(f[0] == doctest::Approx(0.0));
  CHECK(f[1] == doctest::Approx(0.0));
  for (double x : f) CHECK(x >= 0.0);

  CHECK(penalty(exact, t, g, {std::vector<double>(kFeatureCount, 0.0)}) == 0.0);
  const std::vector<int> other{0, 1, 3, 5, 7, 9, 11};
  PenaltyModel m = PenaltyModel::neutral();
  const double base = penalty(other, t, g, m);
  m.gamma[3] *= 2.0;
  const auto fo = embedding_features(other, t, g);
  CHECK(penalty(other, t, g, m) == doctest::Approx(base + PenaltyModel::neutral().gamma[3] * fo[3]));

  PenaltyModel scaled = PenaltyModel::neutral();
  for (auto& x : scaled.gamma) x *= 3.5;
  CHECK(penalty(other, t, g, scaled) == doctest::Approx(3.5 * base));

  CHECK_THROWS_AS(penalty({0, 0, 4, 6, 8, 10, 12}, t, g, m), Error);
  CHECK_THROWS_AS(penalty({0, 1, 2}, t, g, m), Error);
  CHECK_THROWS_AS(penalty(exact, t, g, {{1.0, 2.0}}), Error);
}

TEST_CASE("two-joint template on a single edge") {
  const EmbedGraph g({Vec3::Zero(), Vec3::UnitX()}, {0.5, 0.5}, {{0, 1}});
  const auto e = embed_template(two_joint(), g, PenaltyModel::neutral(), kExhaustive);
  CHECK(e.assignment == std::vector<int>{0, 1});
  const EmbedGraph flipped({Vec3::UnitX(), Vec3::Zero()}, {0.5, 0.5}, {{0, 1}});
  CHECK(embed_template(two_joint(), flipped, PenaltyModel::neutral(), kExhaustive).assignment ==
        std::vector<int>{1, 0});
  // symmetric case: both orders tie, lower vertex first
  PenaltyModel lengths_only{{1, 0, 0, 0, 0}};
  CHECK(embed_template(two_joint(), flipped, lengths_only, kExhaustive).assignment == std::vector<int>{0, 1});
  CHECK(embed_template(two_joint(), flipped, lengths_only, 1).assignment == std::vector<int>{0, 1});
}

TEST_CASE("infeasible embeddings") {
  const auto t = biped_template();
  const EmbedGraph small({Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()}, {1, 1, 1}, {{0, 1}, {1, 2}});
  for (int beam : {kExhaustive, 1, 512}) {
    try {
      embed_template(t, small, PenaltyModel::neutral(), beam);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInfeasibleEmbedding);
    }
  }
  // 8 vertices split 4 + 4: no component holds 7 joints
  std::vector<Vec3> v;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 8; ++i) v.emplace_back(i, 0, 0);
  for (int i = 0; i < 3; ++i) edges.push_back({i, i + 1}), edges.push_back({i + 4, i + 5});
  const EmbedGraph split(v, std::vector<double>(8, 0.6), edges);
  CHECK_THROWS_AS(embed_template(t, split, PenaltyModel::neutral(), kExhaustive), Error);
  CHECK_FALSE(is_feasible({0, 1, 2, 3, 4, 5, 6}, t, split));
  CHECK_THROWS_AS(embed_template(t, split, PenaltyModel::neutral(), -1), Error);
}

TEST_CASE("exhaustive search equals brute force") {
  const auto t = biped_template();
  std::mt19937_64 rng(29);
  for (int n = 0; n < 2; ++n) {
    const auto g = n == 0 ? fixtures::humanoid_graph() : fixtures::perturbed_humanoid_graph(rng, n - 1);
    const auto model = PenaltyModel::neutral();
    const auto oracle = oracles::brute_force_embedding(t, g, model);
    const auto got = embed_template(t, g, model, kExhaustive);
    CHECK(got.assignment == oracle.assignment);
    CHECK(got.penalty == oracle.penalty);
    CHECK(embed_template(t, g, model, 1).penalty >= got.penalty);
    CHECK(embed_template(t, g, model, 512).penalty >= got.penalty);
  }
}

TEST_CASE("scaling gamma keeps the argmin") {
  const auto t = biped_template();
  const auto g = fixtures::humanoid_graph();
  PenaltyModel a{{0.2, 0.5, 0.1, 0.3, 0.4}};
  PenaltyModel b = a;
  for (auto& x : b.gamma) x *= 7.0;
  CHECK(embed_template(t, g, a, kExhaustive).assignment == embed_template(t, g, b, kExhaustive).assignment);
}

TEST_CASE("learn_gamma") {
  SUBCASE("axis-separable") {
    const auto fit = learn_gamma({{1, 0}}, {{0, 1}});
    CHECK(fit.margin == doctest::Approx(1.0));
    CHECK(fit.gamma[0] == doctest::Approx(0.0));
    CHECK(fit.gamma[1] == doctest::Approx(1.0));
    CHECK_FALSE(fit.degenerate);
  }
  SUBCASE("identical sets") {
    const auto fit = learn_gamma({{1, 2, 3}, {0, 1, 0}}, {{0, 1, 0}, {1, 2, 3}});
    CHECK(fit.degenerate);
    CHECK(fit.margin == 0.0);
  }
  SUBCASE("beats a dense random sweep") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<std::vector<double>> good(3, std::vector<double>(2)), bad(3, std::vector<double>(2));
      for (auto* set : {&good, &bad})
        for (auto& v : *set)
          for (auto& x : v) x = u(rng);
      const auto fit = learn_gamma(good, bad, trial);
      CHECK(fit.margin >= oracles::random_margin_sweep(good, bad, 10000, 100 + trial) - 1e-12);
      CHECK(fit.margin == embedding_margin(fit.gamma, good, bad));
      double n2 = 0.0;
      for (double x : fit.gamma) {
        CHECK(x >= 0.0);
        n2 += x * x;
      }
      CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-9);
    }
  }
  SUBCASE("input checks") {
    CHECK_THROWS_AS(learn_gamma({}, {{1.0}}), Error);
    CHECK_THROWS_AS(learn_gamma({{1.0}}, {{1.0, 2.0}}), Error);
    CHECK_THROWS_AS(learn_gamma({{-1.0}}, {{1.0}}), Error);
  }
}

TEST_CASE("refinement") {
  // rod along x, 5x5 section, core at y = z = 3.5
  const auto f = compute_edm(fixtures::box_grid({24, 7, 7}, block({1, 1, 1}, {22, 5, 5})));
  const EmbedGraph g({Vec3(4.5, 3.5, 3.5), Vec3(11.5, 3.5, 3.5), Vec3(18.5, 3.5, 3.5)}, {2, 2, 2}, {{0, 1}, {1, 2}});
  const ReducedTemplate t({{"a", -1, Vec3(0, 0, 0), false, -1},
                           {"b", 0, Vec3(1, 0, 0), false, -1},
                           {"c", 1, Vec3(2, 0, 0), true, -1}});
  const Embedding centered{{0, 1, 2}, 0.0};

  SUBCASE("a joint off the core moves toward it") {
    const EmbedGraph off({Vec3(4.5, 3.5, 3.5), Vec3(11.5, 1.5, 3.5), Vec3(18.5, 3.5, 3.5)}, {2, 1, 2},
                         {{0, 1}, {1, 2}});
    const auto s = refine_embedding(centered, off, f, t);
    const auto& p = s.joints[1].position;
    CHECK(std::hypot(p.y() - 3.5, p.z() - 3.5) < 2.0);
  }
  SUBCASE("structure and clearance") {
    const auto s = refine_embedding(centered, g, f, t);
    REQUIRE(s.joints.size() == 3);
    CHECK(s.joints[2].parent == 1);
    for (const auto& j : s.joints) CHECK(query_distance(f, j.position) > 0.0);
    std::vector<Vec3> before, after;
    for (int v = 0; v < 3; ++v) before.push_back(g.vertices()[v]);
    for (const auto& j : s.joints) after.push_back(j.position);
    CHECK(refinement_energy(after, t, f, 14.0, 1.0) <= refinement_energy(before, t, f, 14.0, 1.0));
  }
}

TEST_CASE("humanoid mesh through method 2") {
  PipelineConfig cfg;
  const auto r = method2(fixtures::humanoid_mesh(), biped_template(), PenaltyModel::neutral(), cfg);
  REQUIRE(r.embedding.assignment.size() == 7);
  auto sorted = r.embedding.assignment;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  check_packing(r.packing, *r.field);
  check_graph(r.graph, *r.field);
  // hands end up on the arms, feet near the floor
  CHECK(r.skeleton.joints[3].position.x() > 0.4);
  CHECK(r.skeleton.joints[4].position.x() < -0.4);
  CHECK(r.skeleton.joints[5].position.y() < 0.3);
  CHECK(r.skeleton.joints[6].position.y() < 0.3);
}
