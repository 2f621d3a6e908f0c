#include "autorig/common.hpp"

#include <algorithm>

namespace autorig {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kTopology: return "topology error";
    case ErrorCode::kIndexRange: return "index out of range";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kNotWatertight: return "mesh not watertight";
    case ErrorCode::kResolutionTooSmall: return "resolution too small";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kEmptyGrid: return "empty grid";
    case ErrorCode::kEmptyResult: return "empty result";
    case ErrorCode::kContractViolation: return "contract violation";
    case ErrorCode::kInconsistentAttachment: return "inconsistent attachment";
    case ErrorCode::kInfeasibleEmbedding: return "no feasible embedding";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kBoneSetMismatch: return "bone set mismatch";
    case ErrorCode::kInvalidConfig: return "invalid config";
  }
  return "unknown error";
}

SegmentDistance point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return {(a + t * ab - p).norm(), t};
}

}  // namespace autorig
