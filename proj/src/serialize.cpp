#include "autorig/serialize.hpp"

#include <cmath>
#include <fstream>

namespace autorig {
namespace {

Vec3 vec_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kParse, std::string(what) + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

}  // namespace

Json skeleton_to_json(const Skeleton& skeleton) {
  Json joints = Json::array();
  for (const auto& jt : skeleton.joints) {
    joints.push_back({{"name", jt.name},
                      {"parent", jt.parent < 0 ? Json(nullptr) : Json(jt.parent)},
                      {"position", vec_to_json(jt.position)}});
  }
  return {{"joints", joints}};
}

Skeleton skeleton_from_json(const Json& j) {
  return guarded([&] {
    Skeleton s;
    for (const auto& jt : j.at("joints")) {
      Joint joint;
      joint.name = jt.value("name", std::string());
      joint.parent = jt.at("parent").is_null() ? -1 : jt.at("parent").get<int>();
      joint.position = vec_from_json(jt.at("position"), "joint position");
      s.joints.push_back(std::move(joint));
    }
    validate_skeleton(s);
    return s;
  });
}

Json segment_binding_to_json(const SegmentBinding& binding) { return {{"vertex_bone", binding.vertex_bone}}; }

SegmentBinding segment_binding_from_json(const Json& j) {
  return guarded([&] { return SegmentBinding{j.at("vertex_bone").get<std::vector<int>>()}; });
}

Json skin_binding_to_json(const SkinBinding& binding) {
  Json weights = Json::array();
  for (const auto& vw : binding.weights) {
    Json row = Json::array();
    for (const auto& [b, w] : vw) row.push_back(Json::array({b, w}));
    weights.push_back(std::move(row));
  }
  return {{"bone_count", binding.bone_count}, {"weights", weights}};
}

SkinBinding skin_binding_from_json(const Json& j) {
  return guarded([&] {
    SkinBinding binding;
    binding.bone_count = j.at("bone_count").get<std::size_t>();
    for (const auto& row : j.at("weights")) {
      std::vector<std::pair<int, double>> vw;
      for (const auto& e : row) {
        const int bone = e.at(0).get<int>();
        if (bone < 0 || static_cast<std::size_t>(bone) >= binding.bone_count)
          throw Error(ErrorCode::kParse, "bone index " + std::to_string(bone) + " out of range");
        vw.push_back({bone, e.at(1).get<double>()});
      }
      binding.weights.push_back(std::move(vw));
    }
    return binding;
  });
}

Json pose_to_json(const Pose& pose) {
  Json bones = Json::array();
  for (const auto& t : pose) {
    bones.push_back({{"rotation", {t.rotation.w(), t.rotation.x(), t.rotation.y(), t.rotation.z()}},
                     {"translation", vec_to_json(t.translation)}});
  }
  return {{"bones", bones}};
}

Pose pose_from_json(const Json& j) {
  return guarded([&] {
    Pose pose;
    for (const auto& b : j.at("bones")) {
      RigidTransform t;
      const auto& q = b.at("rotation");
      if (!q.is_array() || q.size() != 4) throw Error(ErrorCode::kParse, "rotation must be [w, x, y, z]");
      t.rotation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
      if (!(t.rotation.norm() > 0.0)) throw Error(ErrorCode::kParse, "zero rotation quaternion");
      t.rotation.normalize();
      t.translation = vec_from_json(b.at("translation"), "translation");
      pose.push_back(t);
    }
    return pose;
  });
}

Json template_to_json(const ReducedTemplate& tmpl) {
  Json joints = Json::array();
  for (const auto& jt : tmpl.joints()) {
    joints.push_back({{"name", jt.name},
                      {"parent", jt.parent < 0 ? Json(nullptr) : Json(jt.parent)},
                      {"position", vec_to_json(jt.rest_position)},
                      {"extremity", jt.extremity},
                      {"symmetry", jt.symmetry < 0 ? Json(nullptr) : Json(jt.symmetry)}});
  }
  return {{"joints", joints}};
}

ReducedTemplate template_from_json(const Json& j) {
  return guarded([&] {
    std::vector<TemplateJoint> joints;
    for (const auto& jt : j.at("joints")) {
      TemplateJoint t;
      t.name = jt.value("name", std::string());
      t.parent = jt.at("parent").is_null() ? -1 : jt.at("parent").get<int>();
      t.rest_position = vec_from_json(jt.at("position"), "template joint position");
      t.extremity = jt.value("extremity", false);
      if (jt.contains("symmetry") && !jt.at("symmetry").is_null()) t.symmetry = jt.at("symmetry").get<int>();
      joints.push_back(std::move(t));
    }
    return ReducedTemplate(std::move(joints));
  });
}

Json gamma_to_json(const GammaFit& fit) {
  return {{"gamma", fit.gamma}, {"margin", fit.margin}, {"degenerate", fit.degenerate}};
}

PenaltyModel gamma_from_json(const Json& j) {
  return guarded([&] {
    PenaltyModel model;
    model.gamma = (j.is_array() ? j : j.at("gamma")).get<std::vector<double>>();
    if (model.gamma.size() != kFeatureCount) {
      throw Error(ErrorCode::kInvalidConfig, "gamma must have " + std::to_string(kFeatureCount) + " entries");
    }
    return model;
  });
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(1) + "\n"; }

}  // namespace autorig
