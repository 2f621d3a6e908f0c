#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "autorig/ctrlskel.hpp"
#include "autorig/embed.hpp"
#include "autorig/skinning.hpp"

namespace autorig {

using Json = nlohmann::json;

// {"joints":[{"name","parent","position":[x,y,z]}]}, parent null for the root.
Json skeleton_to_json(const Skeleton& skeleton);
Skeleton skeleton_from_json(const Json& j);

// {"vertex_bone":[b0, b1, ...]}
Json segment_binding_to_json(const SegmentBinding& binding);
SegmentBinding segment_binding_from_json(const Json& j);

// {"bone_count":B,"weights":[[[bone,w],...], ...]} one entry per vertex.
Json skin_binding_to_json(const SkinBinding& binding);
SkinBinding skin_binding_from_json(const Json& j);

// {"bones":[{"rotation":[w,x,y,z],"translation":[x,y,z]}]}; rotations are normalized on load.
Json pose_to_json(const Pose& pose);
Pose pose_from_json(const Json& j);

// {"joints":[{"name","parent","position","extremity","symmetry"}]}
Json template_to_json(const ReducedTemplate& tmpl);
ReducedTemplate template_from_json(const Json& j);

// {"gamma":[...]} (a bare array is accepted on load)
Json gamma_to_json(const GammaFit& fit);
PenaltyModel gamma_from_json(const Json& j);

Json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline.
std::string dump_json(const Json& j);

}  // namespace autorig
