#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "augplan/complete.hpp"
#include "augplan/config.hpp"
#include "augplan/esdf.hpp"
#include "augplan/frame_io.hpp"
#include "augplan/mapeval.hpp"
#include "augplan/plan.hpp"
#include "augplan/report.hpp"
#include "augplan/sim.hpp"
#include "augplan/sparsify.hpp"
#include "augplan/tsdf.hpp"
#include "augplan/world.hpp"

namespace augplan {
namespace {

using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::vector<double> ParseList(const std::string& text, std::size_t count,
                              const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kValidation, what + ": cannot parse '" + text + "'");
    }
  }
  if (out.size() != count) {
    throw Error(ErrorCode::kValidation, what + ": expected " +
                                            std::to_string(count) +
                                            " comma-separated numbers");
  }
  return out;
}

Vec3 ParseVec3(const std::string& text, const std::string& what) {
  const std::vector<double> v = ParseList(text, 3, what);
  return Vec3(v[0], v[1], v[2]);
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kValidation,
                path.string() + ": invalid JSON: " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

void EmitJson(const std::string& path, const json& doc) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    WriteJsonFile(path, doc);
  }
}

std::pair<Scene, WaypointSet> LoadScene(const std::string& path) {
  return SceneFromJson(ReadJsonFile(path));
}

std::string CanonicalPreset(const std::string& name) {
  return name == "cylinder-forest" ? "cylinder-forest-paper" : name;
}

// Preset, then config file, then --set assignments.
PipelineConfig ResolvePipeline(const std::string& config_path,
                               const std::string& preset,
                               const std::vector<std::string>& sets) {
  std::vector<json> overrides;
  if (!preset.empty()) overrides.push_back({{"preset", CanonicalPreset(preset)}});
  for (const std::string& s : sets) overrides.push_back(ParseAssignment(s));
  if (config_path.empty()) return ResolveConfig(json::object(), overrides);
  return LoadConfigFile(config_path, overrides);
}

struct GenWorldArgs {
  std::string preset = "cylinder-forest-paper";
  std::uint64_t seed = 0;
  std::string out;
};

void RunGenWorld(const GenWorldArgs& a) {
  WorldConfig world = MakePreset(CanonicalPreset(a.preset)).world;
  world.seed = a.seed;
  const auto [scene, waypoints] = BuildWorld(world);
  EmitJson(a.out, SceneToJson(scene, waypoints));
}

struct RenderArgs {
  std::string scene;
  std::string position;
  double yaw = 0.0;
  int width = 320;
  int height = 240;
  double hfov = 90.0;
  std::string depth_out;
  std::string gray_out;
};

void RunRender(const RenderArgs& a) {
  const auto [scene, waypoints] = LoadScene(a.scene);
  const Pose pose = Pose::LookingAlong(ParseVec3(a.position, "--pos"), a.yaw);
  const Intrinsics intr = Intrinsics::FromHorizontalFov(a.width, a.height, a.hfov);
  const RenderedFrame frame = Render(scene, pose, intr);
  WriteDepth(a.depth_out, frame.depth);
  if (!a.gray_out.empty()) WriteGray(a.gray_out, frame.gray);
}

struct SparsifyArgs {
  SparsifyConfig cfg;
  std::uint64_t frame = 0;
  std::string depth_in;
  std::string gray_in;
  std::string out;
};

void RunSparsify(const SparsifyArgs& a) {
  a.cfg.Validate();
  const DepthFrame sparse =
      Sparsify(ReadDepth(a.depth_in), ReadGray(a.gray_in), a.cfg, a.frame);
  WriteDepth(a.out, sparse);
}

struct CompleteArgs {
  std::string completer = "idw:k=4,pow=2";
  std::size_t frame = 0;
  std::string sparse_in;
  std::string gray_in;
  std::string out;
  std::string provenance_out;
};

void RunComplete(const CompleteArgs& a) {
  const CompleterSpec spec = CompleterSpec::Parse(a.completer);
  const AugmentedFrame aug =
      Complete(spec, ReadGray(a.gray_in), ReadDepth(a.sparse_in), a.frame);
  WriteDepth(a.out, aug.depth);
  if (!a.provenance_out.empty()) WriteProvenance(a.provenance_out, aug.provenance);
}

struct EvalDepthArgs {
  std::string pred;
  std::string gt;
  std::string mask_from;
  std::string mask_source = "predicted";
  std::string report;
};

void RunEvalDepth(const EvalDepthArgs& a) {
  const DepthFrame pred = ReadDepth(a.pred);
  const DepthFrame gt = ReadDepth(a.gt);
  if (!pred.SameShape(gt)) {
    throw Error(ErrorCode::kResolutionMismatch, "pred and gt differ in size");
  }
  const EvalMaskSource source = a.mask_source == "measured"
                                    ? EvalMaskSource::kMeasuredPixels
                                    : EvalMaskSource::kPredictedPixels;
  ValidityMask mask;
  json doc;
  if (a.mask_from.empty()) {
    mask = MakeValidityMask(gt);
  } else {
    const DepthFrame sparse = ReadDepth(a.mask_from);
    mask = EvaluationMask(gt, sparse, source);
    doc["masked_l1"] = MaskedL1(pred, gt, sparse, source);
  }
  const DepthMetrics m = ComputeDepthMetrics(pred, gt, mask);
  doc["rmse"] = m.rmse;
  doc["rel"] = m.rel;
  doc["delta"] = m.delta;
  doc["pixel_count"] = m.pixel_count;
  doc["zero_gt_count"] = m.zero_gt_count;
  doc["mask_source"] = a.mask_source;
  EmitJson(a.report, doc);
}

struct BuildMapArgs {
  std::string scene;
  std::string manifest;
  std::string config;
  std::string preset;
  std::vector<std::string> sets;
  std::string mode = "GroundTruth";
  int survey = 48;
  double height = 1.0;
  std::uint64_t seed = 0;
  std::string bounds;
  std::string out;
};

TsdfGrid BuildFromManifest(const BuildMapArgs& a, const ExperimentConfig& e) {
  if (a.bounds.empty()) {
    throw Error(ErrorCode::kValidation, "--bounds is required with --manifest");
  }
  const std::vector<double> b = ParseList(a.bounds, 6, "--bounds");
  const Aabb box{Vec3(b[0], b[1], b[2]), Vec3(b[3], b[4], b[5])};
  const FrameSequence seq = ReadManifest(a.manifest);
  seq.Validate();
  TsdfGrid tsdf(GridGeometry::Covering(box, e.voxel_size),
                e.integration.delta_trunc);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const SequenceFrame& f = seq.frames[i];
    const DepthFrame depth = ReadSequenceDepth(seq, i);
    std::optional<ProvenanceMask> prov;
    if (!f.provenance_file.empty()) {
      prov = ReadProvenance(seq.Resolve(f.provenance_file));
    }
    const auto points =
        BackprojectFrame(depth, prov ? &*prov : nullptr, f.pose,
                         seq.intrinsics, e.pixel_stride);
    tsdf.Integrate(f.pose.translation, points, e.integration);
  }
  return tsdf;
}

void RunBuildMap(const BuildMapArgs& a) {
  if (a.scene.empty() == a.manifest.empty()) {
    throw Error(ErrorCode::kValidation,
                "build-map needs exactly one of --scene or --manifest");
  }
  const PipelineConfig cfg = ResolvePipeline(a.config, a.preset, a.sets);
  cfg.experiment.Validate();
  TsdfGrid tsdf;
  if (!a.manifest.empty()) {
    tsdf = BuildFromManifest(a, cfg.experiment);
  } else {
    const auto [scene, waypoints] = LoadScene(a.scene);
    const std::vector<Pose> poses = SurveyPoses(scene, a.survey, a.height, 1.0, 0.5);
    tsdf = BuildMap(scene, poses, ParseMode(a.mode), cfg.experiment, a.seed);
  }
  tsdf.Write(a.out);
}

struct EsdfArgs {
  std::string map;
  EsdfConfig cfg{0.2, true, Vec3::Zero(), 0.0, 5.0};
  std::string robot;
  bool unknown_free = false;
  std::string out;
};

void RunEsdf(EsdfArgs a) {
  if (!a.robot.empty()) a.cfg.robot_pos = ParseVec3(a.robot, "--robot");
  a.cfg.unknown_is_obstacle = !a.unknown_free;
  a.cfg.Validate();
  ComputeEsdf(TsdfGrid::Read(a.map), a.cfg).Write(a.out);
}

struct EvalMapArgs {
  std::string test;
  std::string gt;
  CompareOptions options;
  std::string report;
};

void RunEvalMap(const EvalMapArgs& a) {
  const MapComparison cmp =
      CompareMaps(TsdfGrid::Read(a.test), TsdfGrid::Read(a.gt), a.options);
  EmitJson(a.report, ToJson(cmp));
}

struct PlanGlobalArgs {
  std::string esdf;
  std::string start;
  std::string goal;
  RrtOptions rrt;
  std::string out;
};

std::string_view ToString(PlanStatus status) {
  switch (status) {
    case PlanStatus::kOk:
      return "ok";
    case PlanStatus::kNoPathFound:
      return "no-path-found";
    case PlanStatus::kInvalidStart:
      return "invalid-start";
    case PlanStatus::kFailureToProject:
      return "failure-to-project";
    case PlanStatus::kNoLocalPath:
      return "no-local-path";
  }
  return "unknown";
}

int RunPlanGlobal(const PlanGlobalArgs& a) {
  const EsdfGrid esdf = EsdfGrid::Read(a.esdf);
  const PathResult r = RrtStar(esdf, ParseVec3(a.start, "--start"),
                               ParseVec3(a.goal, "--goal"), a.rrt);
  json path = json::array();
  for (const Vec3& p : r.path) path.push_back({p.x(), p.y(), p.z()});
  EmitJson(a.out, {{"status", ToString(r.status)},
                   {"iterations", r.iterations},
                   {"tree_size", r.tree_size},
                   {"length", PolylineLength(r.path)},
                   {"path", path}});
  return r.status == PlanStatus::kOk ? 0 : kExitRuntime;
}

struct SimulateArgs {
  std::string config;
  std::string preset;
  std::vector<std::string> sets;
  std::optional<double> p;
  std::optional<double> r_max;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void RunSimulate(const SimulateArgs& a) {
  std::vector<std::string> sets;
  if (a.p) sets.push_back("sparsify.p=" + json(*a.p).dump());
  if (a.r_max) sets.push_back("sparsify.r_max=" + json(*a.r_max).dump());
  if (a.seed) sets.push_back("seed=" + std::to_string(*a.seed));
  sets.insert(sets.end(), a.sets.begin(), a.sets.end());
  PipelineConfig cfg = ResolvePipeline(a.config, a.preset, sets);
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (cfg.output_dir.empty()) {
    throw Error(ErrorCode::kValidation, "output_dir: no output directory given");
  }
  cfg.Validate();
  const auto [scene, waypoints] = BuildWorld(cfg.world);
  cfg.Validate(scene);

  const std::filesystem::path dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  WriteJsonFile(dir / "config.json", ToJson(cfg));
  WriteJsonFile(dir / "scene.json", SceneToJson(scene, waypoints));

  MatrixOptions options;
  options.modes = cfg.modes;
  options.ordered_pairs = cfg.ordered_pairs;
  options.scene_id = (cfg.preset.empty() ? "scene" : cfg.preset) + "-" +
                     std::to_string(cfg.world.seed);
  const Report report = RunMatrix(scene, waypoints, cfg.experiment, options);
  EmitReport(report, scene, dir);
  for (const ModeAggregate& agg : report.aggregates) {
    std::printf("%-12s success %zu/%zu  collisions %zu\n",
                std::string(ToString(agg.mode)).c_str(), agg.successes,
                agg.runs, agg.collisions);
  }
}

struct ReportArgs {
  std::string report;
  std::string scene;
  std::string out;
};

void RunReport(const ReportArgs& a) {
  const Report report = ReportFromJson(ReadJsonFile(a.report));
  if (a.scene.empty()) {
    EmitReport(report, Scene{}, a.out, ReportFiles{true, true, false});
  } else {
    EmitReport(report, LoadScene(a.scene).first, a.out);
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"Depth-augmented mapping and planning pipeline"};
  app.require_subcommand(1);
  int code = 0;

  GenWorldArgs gen;
  auto* c_gen = app.add_subcommand("gen-world", "Generate a scene and waypoints");
  c_gen->add_option("--preset", gen.preset, "Scene preset")
      ->check(CLI::IsMember({"cylinder-forest", "cylinder-forest-paper",
                             "four-rooms", "mini-forest"}));
  c_gen->add_option("--seed", gen.seed, "World seed");
  c_gen->add_option("--out", gen.out, "Scene JSON (stdout if omitted)");
  c_gen->callback([&] { RunGenWorld(gen); });

  RenderArgs ren;
  auto* c_ren = app.add_subcommand("render", "Render depth and gray frames");
  c_ren->add_option("--scene", ren.scene, "Scene JSON")->required();
  c_ren->add_option("--pos", ren.position, "Camera position x,y,z")->required();
  c_ren->add_option("--yaw", ren.yaw, "Heading in radians");
  c_ren->add_option("--width", ren.width);
  c_ren->add_option("--height", ren.height);
  c_ren->add_option("--hfov", ren.hfov, "Horizontal field of view, degrees");
  c_ren->add_option("--depth", ren.depth_out, "Output DFRM")->required();
  c_ren->add_option("--gray", ren.gray_out, "Output GFRM");
  c_ren->callback([&] { RunRender(ren); });

  SparsifyArgs sp;
  auto* c_sp = app.add_subcommand("sparsify", "Degrade a depth frame");
  c_sp->add_option("--p", sp.cfg.p, "Retained fraction");
  c_sp->add_option("--rmax", sp.cfg.r_max, "Range cutoff (m)");
  c_sp->add_option("--blur", sp.cfg.blur_sigma, "Gradient blur sigma (px)");
  c_sp->add_flag("--dilate", sp.cfg.dilate, "3x3 dilation of kept pixels");
  c_sp->add_flag("--noise", sp.cfg.noise, "Range-dependent depth noise");
  c_sp->add_option("--seed", sp.cfg.seed, "Noise seed");
  c_sp->add_option("--frame", sp.frame, "Frame index for the noise stream");
  c_sp->add_option("depth", sp.depth_in, "Ground-truth DFRM")->required();
  c_sp->add_option("gray", sp.gray_in, "GFRM")->required();
  c_sp->add_option("out", sp.out, "Output DFRM")->required();
  c_sp->callback([&] { RunSparsify(sp); });

  CompleteArgs co;
  auto* c_co = app.add_subcommand("complete", "Fill a sparse depth frame");
  c_co->add_option("--completer", co.completer,
                   "passthrough | nearest | idw:k=4,pow=2 | external:path=...");
  c_co->add_option("--frame", co.frame, "Frame index for external files");
  c_co->add_option("--provenance", co.provenance_out, "Output PMSK");
  c_co->add_option("sparse", co.sparse_in, "Sparse DFRM")->required();
  c_co->add_option("gray", co.gray_in, "GFRM")->required();
  c_co->add_option("out", co.out, "Output DFRM")->required();
  c_co->callback([&] { RunComplete(co); });

  EvalDepthArgs ed;
  auto* c_ed = app.add_subcommand("eval-depth", "Depth loss and metrics");
  c_ed->add_option("pred", ed.pred, "Predicted DFRM")->required();
  c_ed->add_option("gt", ed.gt, "Ground-truth DFRM")->required();
  c_ed->add_option("--mask-from", ed.mask_from, "Sparse DFRM defining the mask");
  c_ed->add_option("--mask-source", ed.mask_source)
      ->check(CLI::IsMember({"predicted", "measured"}));
  c_ed->add_option("--report", ed.report, "Output JSON (stdout if omitted)");
  c_ed->callback([&] { RunEvalDepth(ed); });

  BuildMapArgs bm;
  auto* c_bm = app.add_subcommand("build-map", "Fuse frames into a TSDF");
  c_bm->add_option("--scene", bm.scene, "Scene JSON (scripted survey)");
  c_bm->add_option("--manifest", bm.manifest, "Frame sequence manifest");
  c_bm->add_option("--bounds", bm.bounds, "xmin,ymin,zmin,xmax,ymax,zmax");
  c_bm->add_option("--config", bm.config, "Pipeline config JSON");
  c_bm->add_option("--preset", bm.preset, "Config preset");
  c_bm->add_option("--set", bm.sets, "Override key=value");
  c_bm->add_option("--mode", bm.mode, "GroundTruth | Sparse | Augmented");
  c_bm->add_option("--survey", bm.survey, "Number of survey poses");
  c_bm->add_option("--height", bm.height, "Survey height above the floor");
  c_bm->add_option("--seed", bm.seed);
  c_bm->add_option("--out", bm.out, "Output TSDF")->required();
  c_bm->callback([&] { RunBuildMap(bm); });

  EsdfArgs es;
  auto* c_es = app.add_subcommand("esdf", "Distance field from a TSDF");
  c_es->add_option("map", es.map, "TSDF file")->required();
  c_es->add_option("--t", es.cfg.t, "Free-space threshold");
  c_es->add_option("--robot", es.robot, "Robot position x,y,z");
  c_es->add_option("--sphere", es.cfg.unknown_sphere_radius,
                   "Unknown-as-obstacle radius around the robot");
  c_es->add_flag("--unknown-free", es.unknown_free,
                 "Only unknown voxels inside the sphere are obstacles");
  c_es->add_option("--dcap", es.cfg.d_cap, "Distance cap");
  c_es->add_option("--out", es.out, "Output ESDF")->required();
  c_es->callback([&] { RunEsdf(es); });

  EvalMapArgs em;
  auto* c_em = app.add_subcommand("eval-map", "Compare a TSDF against ground truth");
  c_em->add_option("test", em.test)->required();
  c_em->add_option("gt", em.gt)->required();
  c_em->add_option("--t", em.options.t, "Free-space threshold");
  c_em->add_flag("--strict-fn", em.options.strict_fn,
                 "Count gt-occupied voxels unobserved in test as false negatives");
  c_em->add_option("--report", em.report, "Output JSON (stdout if omitted)");
  c_em->callback([&] { RunEvalMap(em); });

  PlanGlobalArgs pg;
  auto* c_pg = app.add_subcommand("plan-global", "RRT* on an ESDF");
  c_pg->add_option("esdf", pg.esdf)->required();
  c_pg->add_option("--start", pg.start, "x,y,z")->required();
  c_pg->add_option("--goal", pg.goal, "x,y,z")->required();
  c_pg->add_option("--R", pg.rrt.radius, "Clearance radius");
  c_pg->add_option("--budget", pg.rrt.iteration_budget, "Iteration budget");
  c_pg->add_option("--seed", pg.rrt.seed);
  c_pg->add_option("--out", pg.out, "Output JSON (stdout if omitted)");
  c_pg->callback([&] { code = RunPlanGlobal(pg); });

  SimulateArgs si;
  auto* c_si = app.add_subcommand("simulate", "Closed-loop planning experiment");
  c_si->add_option("--config", si.config, "Pipeline config JSON");
  c_si->add_option("--preset", si.preset, "Config preset");
  c_si->add_option("--set", si.sets, "Override key=value (repeatable)");
  c_si->add_option("--p", si.p, "Override sparsify.p");
  c_si->add_option("--rmax", si.r_max, "Override sparsify.r_max");
  c_si->add_option("--seed", si.seed, "Override the experiment seed");
  c_si->add_option("--out", si.out, "Results directory");
  c_si->callback([&] { RunSimulate(si); });

  ReportArgs rp;
  auto* c_rp = app.add_subcommand("report", "Re-render a report");
  c_rp->add_option("report", rp.report, "report.json")->required();
  c_rp->add_option("--scene", rp.scene, "Scene JSON for the SVG");
  c_rp->add_option("--out", rp.out, "Output directory")->required();
  c_rp->callback([&] { RunReport(rp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int exit = app.exit(e);
    return exit == 0 ? 0 : kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kValidation ||
                   e.code() == ErrorCode::kInvalidArgument
               ? kExitValidation
               : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return code;
}

}  // namespace
}  // namespace augplan

int main(int argc, char** argv) { return augplan::Main(argc, argv); }
