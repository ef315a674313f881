#include "augplan/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

namespace augplan {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kValidation, key + ": " + what);
}

void Parse(const json& v, const std::string& key, double& out) {
  if (!v.is_number()) Bad(key, "expected a number");
  out = v.get<double>();
}
void Parse(const json& v, const std::string& key, int& out) {
  if (!v.is_number_integer()) Bad(key, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    Bad(key, "integer out of range");
  }
  out = static_cast<int>(x);
}
void Parse(const json& v, const std::string& key, std::uint64_t& out) {
  if (!v.is_number_unsigned()) Bad(key, "expected a non-negative integer");
  out = v.get<std::uint64_t>();
}
void Parse(const json& v, const std::string& key, bool& out) {
  if (!v.is_boolean()) Bad(key, "expected true or false");
  out = v.get<bool>();
}
void Parse(const json& v, const std::string& key, std::string& out) {
  if (!v.is_string()) Bad(key, "expected a string");
  out = v.get<std::string>();
}
void Parse(const json& v, const std::string& key, Vec3& out) {
  if (!v.is_array() || v.size() != 3) Bad(key, "expected [x, y, z]");
  for (int a = 0; a < 3; ++a) Parse(v[a], key, out[a]);
}

// Reads the keys of one JSON object and rejects anything not consumed.
class Reader {
 public:
  Reader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) Bad(Name(""), "expected an object");
  }

  template <typename T>
  void Field(const char* key, T& out) {
    used_.insert(key);
    const auto it = doc_.find(key);
    if (it != doc_.end()) Parse(*it, Name(key), out);
  }

  template <typename Fn>
  void Object(const char* key, Fn&& fn) {
    used_.insert(key);
    const auto it = doc_.find(key);
    if (it == doc_.end()) return;
    Reader sub(*it, Name(key));
    fn(sub);
    sub.Finish();
  }

  /// Raw access for fields with custom parsing.
  const json* Raw(const char* key) {
    used_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  std::string Name(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "<root>" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  void Finish() const {
    for (const auto& item : doc_.items()) {
      if (!used_.count(item.key())) Bad(Name(item.key()), "unknown key");
    }
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> used_;
};

json ToJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json ToJson(const Aabb& box) {
  return {{"min", ToJson(box.min)}, {"max", ToJson(box.max)}};
}

void ReadAabb(Reader& r, const char* key, Aabb& box) {
  r.Object(key, [&](Reader& b) {
    b.Field("min", box.min);
    b.Field("max", box.max);
  });
}

std::string_view ToString(WorldKind kind) {
  return kind == WorldKind::kCylinderForest ? "cylinder-forest" : "four-rooms";
}

std::string_view ToString(WeightMode mode) {
  return mode == WeightMode::kConstant ? "constant" : "quadratic";
}

json ToJson(const ForestOptions& o) {
  return {{"bounds", ToJson(o.bounds)},
          {"n_cylinders", o.n_cylinders},
          {"radius_min", o.radius_min},
          {"radius_max", o.radius_max},
          {"cylinder_height", o.cylinder_height},
          {"n_boxes", o.n_boxes},
          {"box_size_min", o.box_size_min},
          {"box_size_max", o.box_size_max},
          {"box_height_min", o.box_height_min},
          {"box_height_max", o.box_height_max},
          {"obstacle_gap", o.obstacle_gap},
          {"waypoint_count", o.waypoint_count},
          {"clearance", o.clearance},
          {"waypoint_height", o.waypoint_height},
          {"min_waypoint_separation", o.min_waypoint_separation},
          {"max_attempts", o.max_attempts}};
}

void ReadForest(Reader& r, ForestOptions& o) {
  ReadAabb(r, "bounds", o.bounds);
  r.Field("n_cylinders", o.n_cylinders);
  r.Field("radius_min", o.radius_min);
  r.Field("radius_max", o.radius_max);
  r.Field("cylinder_height", o.cylinder_height);
  r.Field("n_boxes", o.n_boxes);
  r.Field("box_size_min", o.box_size_min);
  r.Field("box_size_max", o.box_size_max);
  r.Field("box_height_min", o.box_height_min);
  r.Field("box_height_max", o.box_height_max);
  r.Field("obstacle_gap", o.obstacle_gap);
  r.Field("waypoint_count", o.waypoint_count);
  r.Field("clearance", o.clearance);
  r.Field("waypoint_height", o.waypoint_height);
  r.Field("min_waypoint_separation", o.min_waypoint_separation);
  r.Field("max_attempts", o.max_attempts);
}

json ToJson(const FourRoomsOptions& o) {
  return {{"bounds", ToJson(o.bounds)},
          {"wall_thickness", o.wall_thickness},
          {"door_width", o.door_width},
          {"boxes_per_room", o.boxes_per_room},
          {"box_size_min", o.box_size_min},
          {"box_size_max", o.box_size_max},
          {"box_height_min", o.box_height_min},
          {"box_height_max", o.box_height_max},
          {"obstacle_gap", o.obstacle_gap},
          {"waypoint_count", o.waypoint_count},
          {"clearance", o.clearance},
          {"waypoint_height", o.waypoint_height},
          {"min_waypoint_separation", o.min_waypoint_separation},
          {"max_attempts", o.max_attempts}};
}

void ReadFourRooms(Reader& r, FourRoomsOptions& o) {
  ReadAabb(r, "bounds", o.bounds);
  r.Field("wall_thickness", o.wall_thickness);
  r.Field("door_width", o.door_width);
  r.Field("boxes_per_room", o.boxes_per_room);
  r.Field("box_size_min", o.box_size_min);
  r.Field("box_size_max", o.box_size_max);
  r.Field("box_height_min", o.box_height_min);
  r.Field("box_height_max", o.box_height_max);
  r.Field("obstacle_gap", o.obstacle_gap);
  r.Field("waypoint_count", o.waypoint_count);
  r.Field("clearance", o.clearance);
  r.Field("waypoint_height", o.waypoint_height);
  r.Field("min_waypoint_separation", o.min_waypoint_separation);
  r.Field("max_attempts", o.max_attempts);
}

void ReadSparsify(Reader& r, SparsifyConfig& c) {
  r.Field("p", c.p);
  r.Field("r_max", c.r_max);
  r.Field("blur_sigma", c.blur_sigma);
  r.Field("dilate", c.dilate);
  r.Field("noise", c.noise);
  r.Field("seed", c.seed);
}

void ReadIntegration(Reader& r, IntegrationConfig& c) {
  r.Field("delta_trunc", c.delta_trunc);
  r.Field("w_pred", c.w_pred);
  if (const json* mode = r.Raw("weight_mode")) {
    std::string text;
    Parse(*mode, r.Name("weight_mode"), text);
    if (text == "constant") {
      c.weight_mode = WeightMode::kConstant;
    } else if (text == "quadratic") {
      c.weight_mode = WeightMode::kQuadratic;
    } else {
      Bad(r.Name("weight_mode"), "expected \"constant\" or \"quadratic\"");
    }
  }
  r.Field("max_weight", c.max_weight);
}

void ReadEsdf(Reader& r, EsdfConfig& c) {
  r.Field("t", c.t);
  r.Field("unknown_is_obstacle", c.unknown_is_obstacle);
  r.Field("robot_pos", c.robot_pos);
  r.Field("unknown_sphere_radius", c.unknown_sphere_radius);
  r.Field("d_cap", c.d_cap);
}

void ReadPlanner(Reader& r, PlannerConfig& c) {
  r.Field("p_g", c.p_g);
  r.Field("sample_radius", c.sample_radius);
  r.Field("n_samples", c.n_samples);
  r.Field("R", c.R);
  r.Field("margin", c.margin);
  r.Field("horizon", c.horizon);
  r.Field("v_max", c.v_max);
  r.Field("rrt_iteration_budget", c.rrt_iteration_budget);
  r.Field("local_iteration_budget", c.local_iteration_budget);
  r.Field("check_step", c.check_step);
  r.Field("seed", c.seed);
  r.Object("weights", [&](Reader& w) {
    w.Field("w_goal", c.weights.w_goal);
    w.Field("w_unk", c.weights.w_unk);
    w.Field("w_clear", c.weights.w_clear);
  });
}

void ReadCamera(Reader& r, Intrinsics& c) {
  r.Field("fx", c.fx);
  r.Field("fy", c.fy);
  r.Field("cx", c.cx);
  r.Field("cy", c.cy);
  r.Field("width", c.width);
  r.Field("height", c.height);
}

void ReadExperiment(Reader& r, ExperimentConfig& c) {
  r.Object("sparsify", [&](Reader& s) { ReadSparsify(s, c.sparsify); });
  r.Object("sparse_reference",
           [&](Reader& s) { ReadSparsify(s, c.sparse_reference); });
  if (const json* completer = r.Raw("completer")) {
    if (completer->is_null()) {
      c.completer.reset();
    } else {
      std::string text;
      Parse(*completer, r.Name("completer"), text);
      try {
        c.completer = CompleterSpec::Parse(text);
      } catch (const Error& e) {
        Bad(r.Name("completer"), e.what());
      }
    }
  }
  r.Object("integration", [&](Reader& s) { ReadIntegration(s, c.integration); });
  r.Object("esdf", [&](Reader& s) { ReadEsdf(s, c.esdf); });
  r.Object("planner", [&](Reader& s) { ReadPlanner(s, c.planner); });
  r.Field("voxel_size", c.voxel_size);
  r.Object("camera", [&](Reader& s) { ReadCamera(s, c.camera); });
  r.Field("pixel_stride", c.pixel_stride);
  r.Field("epsilon", c.epsilon);
  r.Field("timeout", c.timeout);
  r.Field("sense_rate", c.sense_rate);
  r.Field("plan_rate", c.plan_rate);
  r.Field("log_rate", c.log_rate);
  r.Field("stuck_timeout", c.stuck_timeout);
  r.Field("scan_step", c.scan_step);
  r.Field("spawn_clear_radius", c.spawn_clear_radius);
  r.Field("seed", c.seed);
}

// Rethrows module validation errors under the config key they belong to.
template <typename Fn>
void Scoped(const char* key, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kValidation) throw;
    Bad(key, e.what());
  }
}

}  // namespace

void PipelineConfig::Validate() const {
  const ExperimentConfig& e = experiment;
  Scoped("sparsify", [&] { e.sparsify.Validate(); });
  Scoped("sparse_reference", [&] { e.sparse_reference.Validate(); });
  Scoped("completer", [&] {
    if (e.completer) e.completer->Validate();
  });
  Scoped("integration", [&] { e.integration.Validate(e.voxel_size); });
  Scoped("esdf", [&] { e.esdf.Validate(); });
  Scoped("planner", [&] { e.planner.Validate(); });
  Scoped("camera", [&] { e.camera.Validate(); });
  Scoped("experiment", [&] { e.Validate(); });
  if (modes.empty()) Bad("modes", "at least one mode is required");
  const bool augmented =
      std::find(modes.begin(), modes.end(), Mode::kAugmented) != modes.end();
  if (augmented && !e.completer) {
    Bad("completer", "mode Augmented requires a completer");
  }
  if (!augmented && e.completer) {
    Bad("completer", "a completer is only allowed when Augmented is a mode");
  }
  if (e.sparsify.r_max > e.esdf.d_cap) {
    Bad("sparsify.r_max", "must not exceed esdf.d_cap");
  }
  if (e.sparse_reference.r_max > e.esdf.d_cap) {
    Bad("sparse_reference.r_max", "must not exceed esdf.d_cap");
  }
  if (world.kind == WorldKind::kCylinderForest && world.file.empty() &&
      world.forest.waypoint_count < 2) {
    Bad("world.forest.waypoint_count", "at least 2 waypoints are required");
  }
}

void PipelineConfig::Validate(const Scene& scene) const {
  Validate();
  const GridGeometry g =
      GridGeometry::Covering(scene.bounds, experiment.voxel_size);
  const Vec3 end = g.origin + g.Extent();
  if ((g.origin.array() > scene.bounds.min.array()).any() ||
      (end.array() + 1e-9 < scene.bounds.max.array()).any()) {
    Bad("voxel_size", "map grid does not cover the scene bounds");
  }
}

std::vector<std::string> PresetNames() {
  return {"cylinder-forest-paper", "four-rooms", "mini-forest"};
}

PipelineConfig MakePreset(std::string_view name) {
  PipelineConfig cfg;
  cfg.preset = std::string(name);
  ExperimentConfig& e = cfg.experiment;
  e.sparsify.p = 0.25;
  e.sparsify.r_max = 5.0;
  e.sparse_reference.p = 0.5;
  e.sparse_reference.r_max = 7.0;
  e.voxel_size = 0.1;
  e.integration.delta_trunc = 0.4;
  e.integration.w_pred = 0.1;
  e.esdf.t = 0.2;
  e.epsilon = 0.25;
  e.timeout = 40.0;
  e.completer = CompleterSpec{};
  if (name == "cylinder-forest-paper") {
    cfg.world.kind = WorldKind::kCylinderForest;
  } else if (name == "four-rooms") {
    cfg.world.kind = WorldKind::kFourRooms;
    cfg.world.four_rooms.waypoint_count = 7;
    e.epsilon = 1.0;
  } else if (name == "mini-forest") {
    cfg.world.kind = WorldKind::kCylinderForest;
    cfg.world.forest.bounds = Aabb{Vec3(0.0, 0.0, 0.0), Vec3(10.0, 8.0, 3.0)};
    cfg.world.forest.n_cylinders = 8;
    cfg.world.forest.n_boxes = 0;
    cfg.world.forest.waypoint_count = 4;
    cfg.world.forest.min_waypoint_separation = 4.0;
  } else {
    throw Error(ErrorCode::kValidation,
                "preset: unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

nlohmann::json ToJson(const SparsifyConfig& c) {
  return {{"p", c.p},           {"r_max", c.r_max}, {"blur_sigma", c.blur_sigma},
          {"dilate", c.dilate}, {"noise", c.noise}, {"seed", c.seed}};
}

nlohmann::json ToJson(const IntegrationConfig& c) {
  return {{"delta_trunc", c.delta_trunc},
          {"w_pred", c.w_pred},
          {"weight_mode", ToString(c.weight_mode)},
          {"max_weight", c.max_weight}};
}

nlohmann::json ToJson(const EsdfConfig& c) {
  return {{"t", c.t},
          {"unknown_is_obstacle", c.unknown_is_obstacle},
          {"robot_pos", ToJson(c.robot_pos)},
          {"unknown_sphere_radius", c.unknown_sphere_radius},
          {"d_cap", c.d_cap}};
}

nlohmann::json ToJson(const PlannerConfig& c) {
  return {{"p_g", c.p_g},
          {"sample_radius", c.sample_radius},
          {"n_samples", c.n_samples},
          {"R", c.R},
          {"margin", c.margin},
          {"horizon", c.horizon},
          {"v_max", c.v_max},
          {"rrt_iteration_budget", c.rrt_iteration_budget},
          {"local_iteration_budget", c.local_iteration_budget},
          {"check_step", c.check_step},
          {"seed", c.seed},
          {"weights",
           {{"w_goal", c.weights.w_goal},
            {"w_unk", c.weights.w_unk},
            {"w_clear", c.weights.w_clear}}}};
}

nlohmann::json ToJson(const ExperimentConfig& c) {
  return {{"sparsify", ToJson(c.sparsify)},
          {"sparse_reference", ToJson(c.sparse_reference)},
          {"completer", c.completer ? json(c.completer->ToString()) : json()},
          {"integration", ToJson(c.integration)},
          {"esdf", ToJson(c.esdf)},
          {"planner", ToJson(c.planner)},
          {"voxel_size", c.voxel_size},
          {"camera",
           {{"fx", c.camera.fx},
            {"fy", c.camera.fy},
            {"cx", c.camera.cx},
            {"cy", c.camera.cy},
            {"width", c.camera.width},
            {"height", c.camera.height}}},
          {"pixel_stride", c.pixel_stride},
          {"epsilon", c.epsilon},
          {"timeout", c.timeout},
          {"sense_rate", c.sense_rate},
          {"plan_rate", c.plan_rate},
          {"log_rate", c.log_rate},
          {"stuck_timeout", c.stuck_timeout},
          {"scan_step", c.scan_step},
          {"spawn_clear_radius", c.spawn_clear_radius},
          {"seed", c.seed}};
}

nlohmann::json ToJson(const PipelineConfig& c) {
  json doc = ToJson(c.experiment);
  doc["preset"] = c.preset;
  doc["output_dir"] = c.output_dir;
  doc["world"] = {{"kind", ToString(c.world.kind)},
                  {"seed", c.world.seed},
                  {"file", c.world.file},
                  {"forest", ToJson(c.world.forest)},
                  {"four_rooms", ToJson(c.world.four_rooms)}};
  json modes = json::array();
  for (Mode m : c.modes) modes.push_back(ToString(m));
  doc["modes"] = modes;
  doc["ordered_pairs"] = c.ordered_pairs;
  return doc;
}

void ApplyJson(const nlohmann::json& doc, PipelineConfig& cfg) {
  Reader r(doc, "");
  r.Field("preset", cfg.preset);
  r.Field("output_dir", cfg.output_dir);
  r.Object("world", [&](Reader& w) {
    if (const json* kind = w.Raw("kind")) {
      std::string text;
      Parse(*kind, w.Name("kind"), text);
      if (text == "cylinder-forest") {
        cfg.world.kind = WorldKind::kCylinderForest;
      } else if (text == "four-rooms") {
        cfg.world.kind = WorldKind::kFourRooms;
      } else {
        Bad(w.Name("kind"), "expected \"cylinder-forest\" or \"four-rooms\"");
      }
    }
    w.Field("seed", cfg.world.seed);
    w.Field("file", cfg.world.file);
    w.Object("forest", [&](Reader& f) { ReadForest(f, cfg.world.forest); });
    w.Object("four_rooms",
             [&](Reader& f) { ReadFourRooms(f, cfg.world.four_rooms); });
  });
  if (const json* modes = r.Raw("modes")) {
    if (!modes->is_array()) Bad("modes", "expected an array of mode names");
    cfg.modes.clear();
    for (const json& m : *modes) {
      std::string text;
      Parse(m, "modes", text);
      try {
        cfg.modes.push_back(ParseMode(text));
      } catch (const Error& e) {
        Bad("modes", e.what());
      }
    }
  }
  r.Field("ordered_pairs", cfg.ordered_pairs);
  ReadExperiment(r, cfg.experiment);
  r.Finish();
}

nlohmann::json ParseAssignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::kValidation,
                "override '" + std::string(assignment) + "' must be key=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json doc = json::object();
  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot - begin);
    if (key.empty()) {
      throw Error(ErrorCode::kValidation, "override key '" + path + "' is malformed");
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    begin = dot + 1;
  }
  return doc;
}

PipelineConfig ResolveConfig(const nlohmann::json& file_doc,
                             const std::vector<nlohmann::json>& overrides) {
  std::string preset;
  auto pick_preset = [&](const json& doc) {
    if (doc.is_object() && doc.contains("preset") && doc["preset"].is_string()) {
      preset = doc["preset"].get<std::string>();
    }
  };
  pick_preset(file_doc);
  for (const json& o : overrides) pick_preset(o);
  PipelineConfig cfg = preset.empty() ? PipelineConfig{} : MakePreset(preset);
  if (!file_doc.is_null()) ApplyJson(file_doc, cfg);
  for (const json& o : overrides) ApplyJson(o, cfg);
  cfg.Validate();
  return cfg;
}

PipelineConfig LoadConfigFile(const std::filesystem::path& path,
                              const std::vector<nlohmann::json>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kValidation, path.string() + " is not valid JSON");
  }
  return ResolveConfig(doc, overrides);
}

std::pair<Scene, WaypointSet> BuildWorld(const WorldConfig& world) {
  if (!world.file.empty()) {
    std::ifstream in(world.file);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + world.file);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      throw Error(ErrorCode::kValidation, world.file + " is not valid JSON");
    }
    return SceneFromJson(doc);
  }
  if (world.kind == WorldKind::kFourRooms) {
    return GenerateFourRooms(world.seed, world.four_rooms);
  }
  return GenerateCylinderForest(world.seed, world.forest);
}

std::string ConfigDigest(const ExperimentConfig& cfg) {
  return Fnv1aHex(ToJson(cfg).dump());
}

}  // namespace augplan
