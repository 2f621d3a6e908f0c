#include "autorig/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "autorig/serialize.hpp"

namespace autorig {
namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kInvalidConfig, "invalid value '" + value + "' for " + key);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

Json voxel_list(const std::vector<Voxel>& voxels) {
  Json out = Json::array();
  for (const auto& v : voxels) out.push_back(Json::array({v[0], v[1], v[2]}));
  return out;
}

}  // namespace

void apply_setting(PipelineConfig& config, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '_', '-');
  const std::string value = trim(raw_value);
  if (key == "method") {
    if (value == "pathtree" || value == "method1") config.method = Method::kPathTree;
    else if (value == "embed" || value == "method2") config.method = Method::kEmbed;
    else bad_value(key, value);
  } else if (key == "resolution") {
    config.resolution = parse_number<int>(key, value);
  } else if (key == "dms-min-dist") {
    config.dms_min_dist = parse_number<double>(key, value);
  } else if (key == "extreme-threshold") {
    config.extreme_threshold = parse_number<double>(key, value);
  } else if (key == "segments") {
    config.segments = parse_number<int>(key, value);
  } else if (key == "smooth-iters") {
    config.smoothing_iterations = parse_number<int>(key, value);
  } else if (key == "max-error") {
    config.max_error = parse_number<double>(key, value);
  } else if (key == "min-radius") {
    config.min_radius = parse_number<double>(key, value);
  } else if (key == "beam") {
    config.beam = parse_number<int>(key, value);
  } else if (key == "gamma") {
    config.gamma_path = value;
  } else if (key == "template") {
    config.template_path = value;
  } else if (key == "max-influences") {
    config.max_influences = parse_number<int>(key, value);
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "pathcost") {
    if (value == "step") config.path_cost = PathCost::kStepLength;
    else if (value == "paper") config.path_cost = PathCost::kPerVoxel;
    else bad_value(key, value);
  } else if (key == "dump-debug") {
    config.dump_debug = parse_bool(key, value);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + trim(raw_key) + "'");
  }
}

void load_config(PipelineConfig& config, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "config line " + std::to_string(line_no) + " is not key = value");
    }
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

void load_config_file(PipelineConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  load_config(config, in);
}

void validate_config(const PipelineConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
  };
  require(c.resolution >= 8 && c.resolution <= 512, "resolution must be in [8, 512]");
  require(c.dms_min_dist >= 1.0, "dms-min-dist must be >= 1");
  require(c.extreme_threshold >= 0.0, "extreme-threshold must be >= 0");
  require(c.segments >= 1, "segments must be >= 1");
  require(c.smoothing_iterations >= 0, "smooth-iters must be >= 0");
  require(!c.max_error || *c.max_error >= 0.0, "max-error must be >= 0");
  require(!c.min_radius || *c.min_radius > 0.0, "min-radius must be > 0");
  require(c.beam >= 0, "beam must be >= 0 (0 = exhaustive)");
  require(c.max_influences >= 1, "max-influences must be >= 1");
}

int exit_code_for(const Error& error) { return error.code() == ErrorCode::kInfeasibleEmbedding ? 2 : 1; }

Method1Result method1(const TriangleMesh& mesh, const PipelineConfig& config) {
  stage("config", [&] { validate_config(config); });
  Method1Result r;
  r.grid = stage("voxelize", [&] { return voxelize(mesh, config.resolution); });
  r.field.emplace(stage("compute_edm", [&] { return compute_edm(r.grid); }));
  const DistanceField& field = *r.field;
  r.dms = stage("extract_dms", [&] { return extract_dms(field, config.dms_min_dist); });
  r.heart = stage("find_heart", [&] { return find_heart(r.dms, field); });
  r.extremes = stage("find_extreme_points", [&] { return find_extreme_points(r.dms, field, r.heart); });
  r.tree = stage("build_path_tree", [&] {
    return build_path_tree(r.dms, field, r.heart, r.extremes, {config.extreme_threshold, config.path_cost});
  });
  const double max_error = config.max_error.value_or(1.5 * r.grid.cell_size());
  for (const auto& chain : r.tree.chains) {
    r.chains.push_back(stage("smooth_chain", [&] { return smooth_chain(chain.voxels, r.grid, config.smoothing_iterations); }));
    r.splits.push_back(stage("split_chain", [&] { return split_chain(r.chains.back().points, config.segments, max_error); }));
  }
  r.skeleton = stage("build_skeleton", [&] { return build_skeleton(r.tree, r.chains, r.splits, field); });
  r.binding = stage("bind_segments", [&] { return bind_segments(mesh, r.skeleton); });
  return r;
}

Artifacts method1_artifacts(const Method1Result& r, const PipelineConfig& config) {
  Artifacts out;
  out["skeleton.json"] = dump_json(skeleton_to_json(r.skeleton));
  out["binding.json"] = dump_json(segment_binding_to_json(r.binding));
  if (config.dump_debug) {
    std::ostringstream vox, edm, dms, chains;
    write_voxel_dump(r.grid, vox);
    write_distance_dump(*r.field, edm);
    write_medial_dump(r.dms, dms);
    write_chain_dump(r.chains, chains);
    out["voxels.txt"] = vox.str();
    out["edm.txt"] = edm.str();
    out["dms.txt"] = dms.str();
    out["chains.obj"] = chains.str();
    Json tree;
    tree["heart"] = Json::array({r.heart.voxel[0], r.heart.voxel[1], r.heart.voxel[2]});
    tree["extremes"] = voxel_list(r.extremes);
    tree["rejected"] = voxel_list(r.tree.rejected);
    tree["warnings"] = r.tree.warnings;
    Json chain_list = Json::array();
    for (std::size_t c = 0; c < r.tree.chains.size(); ++c) {
      chain_list.push_back({{"voxels", voxel_list(r.tree.chains[c].voxels)}, {"splits", r.splits[c].indices}});
    }
    tree["chains"] = chain_list;
    out["pathtree.json"] = dump_json(tree);
  }
  return out;
}

ReducedTemplate resolve_template(const std::string& template_path) {
  if (template_path.empty() || template_path == "biped") return biped_template();
  if (template_path == "quadruped") return quadruped_template();
  return template_from_json(read_json_file(template_path));
}

Method2Result method2(const TriangleMesh& mesh, const ReducedTemplate& tmpl, const PenaltyModel& model,
                      const PipelineConfig& config) {
  stage("config", [&] { validate_config(config); });
  Method2Result r;
  r.tmpl = tmpl;
  r.grid = stage("voxelize", [&] { return voxelize(mesh, config.resolution); });
  r.field.emplace(stage("compute_edm", [&] { return compute_edm(r.grid); }));
  const DistanceField& field = *r.field;
  r.dms = stage("extract_dms", [&] { return extract_dms(field, config.dms_min_dist); });
  const double min_radius = config.min_radius.value_or(2.0 * r.grid.cell_size());
  r.packing = stage("pack_spheres", [&] { return pack_spheres(r.dms, field, min_radius); });
  r.graph = stage("build_graph", [&] { return build_graph(r.packing, field); });
  r.embedding = stage("embed_template", [&] { return embed_template(tmpl, r.graph, model, config.beam); });
  r.skeleton = stage("refine_embedding", [&] { return refine_embedding(r.embedding, r.graph, field, tmpl); });
  HeatOptions heat;
  heat.max_influences = config.max_influences;
  r.weights = stage("compute_heat_weights", [&] { return compute_heat_weights(mesh, r.skeleton, field, heat); });
  return r;
}

Artifacts method2_artifacts(const Method2Result& r, const PipelineConfig& config) {
  Artifacts out;
  out["skeleton.json"] = dump_json(skeleton_to_json(r.skeleton));
  out["weights.json"] = dump_json(skin_binding_to_json(r.weights));
  if (config.dump_debug) {
    std::ostringstream vox, edm, dms;
    write_voxel_dump(r.grid, vox);
    write_distance_dump(*r.field, edm);
    write_medial_dump(r.dms, dms);
    out["voxels.txt"] = vox.str();
    out["edm.txt"] = edm.str();
    out["dms.txt"] = dms.str();
    std::ostringstream graph;
    char buf[128];
    for (const auto& s : r.packing.spheres) {
      std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", s.center.x(), s.center.y(), s.center.z());
      graph << buf;
    }
    for (const auto& [a, b] : r.graph.edges()) graph << "l " << a + 1 << ' ' << b + 1 << '\n';
    out["graph.obj"] = graph.str();
    Json spheres = Json::array();
    for (const auto& s : r.packing.spheres) {
      spheres.push_back({{"center", {s.center.x(), s.center.y(), s.center.z()}}, {"radius", s.radius}});
    }
    out["spheres.json"] = dump_json({{"spheres", spheres}});
    const auto f = embedding_features(r.embedding.assignment, r.tmpl, r.graph);
    out["embedding.json"] = dump_json({{"assignment", r.embedding.assignment},
                                       {"penalty", r.embedding.penalty},
                                       {"features", std::vector<double>(f.begin(), f.end())}});
  }
  return out;
}

void write_artifacts(const Artifacts& artifacts, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create output directory " + dir + ": " + ec.message());
  std::vector<fs::path> written;
  for (const auto& [name, contents] : artifacts) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << contents;
    out.close();
    if (!out) {
      for (const auto& p : written) fs::remove(p, ec);
      fs::remove(path, ec);
      throw Error(ErrorCode::kIo, "cannot write " + path.string());
    }
    written.push_back(path);
  }
}

Artifacts run_method1(const PipelineConfig& config, const std::string& mesh_path) {
  const TriangleMesh mesh = stage("load_mesh", [&] { return load_mesh(mesh_path); });
  const Method1Result result = method1(mesh, config);
  Artifacts artifacts = method1_artifacts(result, config);
  stage("write", [&] { write_artifacts(artifacts, config.out_dir); });
  return artifacts;
}

Artifacts run_method2(const PipelineConfig& config, const std::string& mesh_path) {
  const TriangleMesh mesh = stage("load_mesh", [&] { return load_mesh(mesh_path); });
  const ReducedTemplate tmpl = stage("load_template", [&] { return resolve_template(config.template_path); });
  const PenaltyModel model = stage("load_gamma", [&] {
    return config.gamma_path.empty() ? PenaltyModel::neutral() : gamma_from_json(read_json_file(config.gamma_path));
  });
  const Method2Result result = method2(mesh, tmpl, model, config);
  Artifacts artifacts = method2_artifacts(result, config);
  stage("write", [&] { write_artifacts(artifacts, config.out_dir); });
  return artifacts;
}

TriangleMesh run_pose(const std::string& skeleton_path, const std::string& binding_path,
                      const std::string& pose_path, const std::string& mesh_path) {
  const Skeleton skeleton = stage("load_skeleton", [&] { return skeleton_from_json(read_json_file(skeleton_path)); });
  const Json binding = stage("load_binding", [&] { return read_json_file(binding_path); });
  const Pose pose = stage("load_pose", [&] { return pose_from_json(read_json_file(pose_path)); });
  const TriangleMesh mesh = stage("load_mesh", [&] { return load_mesh(mesh_path); });
  const std::size_t bones = skeleton.bone_count();
  return stage("pose", [&] {
    if (pose.size() != bones) {
      throw Error(ErrorCode::kBoneSetMismatch, "skeleton has " + std::to_string(bones) + " bones, pose has " +
                                                   std::to_string(pose.size()));
    }
    const Pose rest = identity_pose(bones);
    if (binding.contains("weights")) {
      const SkinBinding weights = skin_binding_from_json(binding);
      if (weights.bone_count != bones) {
        throw Error(ErrorCode::kBoneSetMismatch, "skeleton has " + std::to_string(bones) + " bones, weights have " +
                                                     std::to_string(weights.bone_count));
      }
      return lbs_deform(mesh, weights, rest, pose);
    }
    const SegmentBinding segments = segment_binding_from_json(binding);
    return rigid_deform(mesh, segments, rest, pose);
  });
}

GammaFit run_learn_gamma(const std::string& features_path, std::uint64_t seed) {
  const Json j = stage("load_features", [&] { return read_json_file(features_path); });
  return stage("learn_gamma", [&] {
    try {
      const auto good = j.at("good").get<std::vector<std::vector<double>>>();
      const auto bad = j.at("bad").get<std::vector<std::vector<double>>>();
      return learn_gamma(good, bad, seed);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, e.what());
    }
  });
}

}  // namespace autorig
