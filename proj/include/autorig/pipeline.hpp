#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autorig/ctrlskel.hpp"
#include "autorig/embed.hpp"
#include "autorig/skinning.hpp"

namespace autorig {

enum class Method { kPathTree, kEmbed };

/// Every tunable of both pipelines. Optional fields default to values derived
/// from the voxel size.
struct PipelineConfig {
  Method method = Method::kPathTree;
  int resolution = 64;
  double dms_min_dist = 2.0;
  double extreme_threshold = 4.0;
  int segments = 3;
  int smoothing_iterations = 10;
  std::optional<double> max_error;   // world units; default 1.5 cells
  std::optional<double> min_radius;  // world units; default 2 cells
  int beam = 512;
  std::string gamma_path;            // empty: neutral weights
  std::string template_path;         // empty or "biped": built-in biped; "quadruped": built-in quadruped
  int max_influences = 4;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  PathCost path_cost = PathCost::kStepLength;
  bool dump_debug = false;
};

/// Applies one `key = value` setting. Keys use the CLI flag spelling without
/// leading dashes ('_' and '-' are interchangeable). Throws kInvalidConfig.
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value);

/// Reads a `key = value` file (# comments) on top of `config`.
void load_config(PipelineConfig& config, std::istream& in);
void load_config_file(PipelineConfig& config, const std::string& path);

/// Range checks; throws kInvalidConfig.
void validate_config(const PipelineConfig& config);

/// An error raised inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Process exit code for an error: 2 for infeasible embeddings, 1 otherwise.
int exit_code_for(const Error& error);

struct Method1Result {
  VoxelGrid grid;
  std::optional<DistanceField> field;
  MedialSurface dms;
  Heart heart;
  std::vector<Voxel> extremes;
  PathTree tree;
  std::vector<SmoothChain> chains;
  std::vector<ChainSplit> splits;
  Skeleton skeleton;
  SegmentBinding binding;
};

struct Method2Result {
  VoxelGrid grid;
  std::optional<DistanceField> field;
  MedialSurface dms;
  SpherePacking packing;
  EmbedGraph graph;
  ReducedTemplate tmpl;
  Embedding embedding;
  Skeleton skeleton;
  SkinBinding weights;
};

/// Artifact file name -> contents.
using Artifacts = std::map<std::string, std::string>;

Method1Result method1(const TriangleMesh& mesh, const PipelineConfig& config);
Artifacts method1_artifacts(const Method1Result& result, const PipelineConfig& config);

ReducedTemplate resolve_template(const std::string& template_path);
Method2Result method2(const TriangleMesh& mesh, const ReducedTemplate& tmpl, const PenaltyModel& model,
                      const PipelineConfig& config);
Artifacts method2_artifacts(const Method2Result& result, const PipelineConfig& config);

/// Writes all artifacts into dir, or none of them: anything already written
/// is removed if a later write fails.
void write_artifacts(const Artifacts& artifacts, const std::string& dir);

/// Load, run, write. Stage errors surface as StageError.
Artifacts run_method1(const PipelineConfig& config, const std::string& mesh_path);
Artifacts run_method2(const PipelineConfig& config, const std::string& mesh_path);

/// Poses `mesh_path` with `pose_path` transforms. The binding file decides the
/// deformation: "weights" (linear blend) or "vertex_bone" (rigid per bone).
TriangleMesh run_pose(const std::string& skeleton_path, const std::string& binding_path,
                      const std::string& pose_path, const std::string& mesh_path);

/// Reads {"good":[[...]],"bad":[[...]]}, returns the fitted gamma.
GammaFit run_learn_gamma(const std::string& features_path, std::uint64_t seed);

}  // namespace autorig
