// autorig: skeleton extraction and skinning for closed triangle meshes.
//
//   autorig method1 mesh.obj [--out dir] [--resolution 64] [--segments 3] ...
//   autorig method2 mesh.obj [--template biped|quadruped|file.json] [--gamma g.json] ...
//   autorig pose skeleton.json binding.json pose.json mesh.obj --out posed.obj
//   autorig learn-gamma features.json [--out gamma.json] [--seed 0]
//
// Exit codes: 0 ok, 1 stage failure, 2 infeasible embedding.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "autorig/pipeline.hpp"
#include "autorig/serialize.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> resolution;
  std::optional<double> dms_min_dist;
  std::optional<double> extreme_threshold;
  std::optional<int> segments;
  std::optional<int> smooth_iters;
  std::optional<double> max_error;
  std::optional<double> min_radius;
  std::optional<int> beam;
  std::optional<std::string> template_path;
  std::optional<std::string> gamma_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> max_influences;
  std::optional<std::string> pathcost;
  bool dump_debug = false;
};

void add_pipeline_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key = value config file (flags win)");
  cmd->add_option("--resolution", o.resolution, "voxels along the longest axis (default 64)");
  cmd->add_option("--dms-min-dist", o.dms_min_dist, "medial voxel distance floor, voxels (default 2)");
  cmd->add_option("--out", o.out, "output directory (default .)");
  cmd->add_flag("--dump-debug", o.dump_debug, "also write intermediate dumps");
}

autorig::PipelineConfig resolve(const Overrides& o, autorig::Method method) {
  autorig::PipelineConfig config;
  config.method = method;
  if (!o.config_path.empty()) autorig::load_config_file(config, o.config_path);
  if (o.resolution) config.resolution = *o.resolution;
  if (o.dms_min_dist) config.dms_min_dist = *o.dms_min_dist;
  if (o.extreme_threshold) config.extreme_threshold = *o.extreme_threshold;
  if (o.segments) config.segments = *o.segments;
  if (o.smooth_iters) config.smoothing_iterations = *o.smooth_iters;
  if (o.max_error) config.max_error = *o.max_error;
  if (o.min_radius) config.min_radius = *o.min_radius;
  if (o.beam) config.beam = *o.beam;
  if (o.template_path) config.template_path = *o.template_path;
  if (o.gamma_path) config.gamma_path = *o.gamma_path;
  if (o.seed) config.seed = *o.seed;
  if (o.out) config.out_dir = *o.out;
  if (o.max_influences) config.max_influences = *o.max_influences;
  if (o.pathcost) autorig::apply_setting(config, "pathcost", *o.pathcost);
  if (o.dump_debug) config.dump_debug = true;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic skeleton extraction and skinning"};
  app.require_subcommand(1);

  Overrides m1;
  std::string m1_mesh;
  auto* method1 = app.add_subcommand("method1", "distance map / path tree pipeline");
  method1->add_option("mesh", m1_mesh, "closed triangle mesh (OBJ)")->required();
  add_pipeline_flags(method1, m1);
  method1->add_option("--extreme-threshold", m1.extreme_threshold, "extreme point acceptance distance, voxels (default 4)");
  method1->add_option("--segments", m1.segments, "bone budget per chain (default 3)");
  method1->add_option("--smooth-iters", m1.smooth_iters, "chain smoothing passes (default 10)");
  method1->add_option("--max-error", m1.max_error, "chain fitting tolerance, model units (default 1.5 voxels)");
  method1->add_option("--pathcost", m1.pathcost, "path cost model: step (default) or paper")
      ->check(CLI::IsMember({"step", "paper"}));

  Overrides m2;
  std::string m2_mesh;
  auto* method2 = app.add_subcommand("method2", "sphere packing / template embedding pipeline");
  method2->add_option("mesh", m2_mesh, "closed triangle mesh (OBJ)")->required();
  add_pipeline_flags(method2, m2);
  method2->add_option("--template", m2.template_path, "biped (default), quadruped or a template JSON file");
  method2->add_option("--gamma", m2.gamma_path, "penalty weights JSON (default neutral)");
  method2->add_option("--min-radius", m2.min_radius, "smallest packed sphere, model units (default 2 voxels)");
  method2->add_option("--beam", m2.beam, "embedding beam width, 0 = exhaustive (default 512)");
  method2->add_option("--max-influences", m2.max_influences, "bones per vertex after pruning (default 4)");
  method2->add_option("--seed", m2.seed, "random seed");

  std::string skeleton_path, binding_path, pose_path, pose_mesh, posed_out = "posed.obj";
  auto* pose = app.add_subcommand("pose", "deform a mesh with a skeleton pose");
  pose->add_option("skeleton", skeleton_path, "skeleton.json")->required();
  pose->add_option("binding", binding_path, "weights.json (method2) or binding.json (method1)")->required();
  pose->add_option("pose", pose_path, "pose JSON: per bone rotation [w,x,y,z] + translation")->required();
  pose->add_option("mesh", pose_mesh, "rest mesh (OBJ)")->required();
  pose->add_option("--out", posed_out, "posed OBJ path (default posed.obj)");

  std::string features_path, gamma_out = "gamma.json";
  std::uint64_t gamma_seed = 0;
  auto* learn = app.add_subcommand("learn-gamma", "fit penalty weights from good/bad feature vectors");
  learn->add_option("features", features_path, "JSON {\"good\": [[...]], \"bad\": [[...]]}")->required();
  learn->add_option("--out", gamma_out, "gamma JSON path (default gamma.json)");
  learn->add_option("--seed", gamma_seed, "multi-start seed (default 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*method1) {
      const auto config = resolve(m1, autorig::Method::kPathTree);
      const auto artifacts = autorig::run_method1(config, m1_mesh);
      std::cout << "wrote " << artifacts.size() << " artifact(s) to " << config.out_dir << '\n';
    } else if (*method2) {
      const auto config = resolve(m2, autorig::Method::kEmbed);
      const auto artifacts = autorig::run_method2(config, m2_mesh);
      std::cout << "wrote " << artifacts.size() << " artifact(s) to " << config.out_dir << '\n';
    } else if (*pose) {
      const auto posed = autorig::run_pose(skeleton_path, binding_path, pose_path, pose_mesh);
      autorig::write_mesh(posed, posed_out);
      std::cout << "wrote " << posed_out << '\n';
    } else if (*learn) {
      const auto fit = autorig::run_learn_gamma(features_path, gamma_seed);
      if (fit.degenerate) std::cerr << "warning: good and bad sets coincide; margin is 0 for every gamma\n";
      std::ofstream out(gamma_out);
      out << autorig::dump_json(autorig::gamma_to_json(fit));
      if (!out) throw autorig::Error(autorig::ErrorCode::kIo, "cannot write " + gamma_out);
      std::cout << "margin " << fit.margin << ", wrote " << gamma_out << '\n';
    }
  } catch (const autorig::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return autorig::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
