#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace autorig {

using Vec3 = Eigen::Vector3d;

/// Integer voxel coordinate (i, j, k).
using Voxel = std::array<int, 3>;

enum class ErrorCode {
  kParse,
  kTopology,
  kIndexRange,
  kIo,
  kNotWatertight,
  kResolutionTooSmall,
  kOutOfRange,
  kEmptyGrid,
  kEmptyResult,
  kContractViolation,
  kInconsistentAttachment,
  kInfeasibleEmbedding,
  kSingularSystem,
  kBoneSetMismatch,
  kInvalidConfig,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Distance from p to the closed segment [a, b], and the clamped parameter of
/// the closest point.
struct SegmentDistance {
  double distance = 0.0;
  double t = 0.0;
};

SegmentDistance point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

}  // namespace autorig
