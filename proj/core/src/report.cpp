#include "augplan/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace augplan {
namespace {

using nlohmann::json;

// Shortest decimal text that reads back to the same double.
std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", precision, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

json Vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 VecFrom(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(),
              j.at(2).get<double>());
}

FailureReason ParseFailure(const std::string& s) {
  if (s.empty()) return FailureReason::kNone;
  if (s == "timeout") return FailureReason::kTimeout;
  if (s == "planner-stuck") return FailureReason::kPlannerStuck;
  if (s == "collision") return FailureReason::kCollision;
  throw Error(ErrorCode::kValidation, "unknown failure reason '" + s + "'");
}

const char* ModeColor(Mode mode) {
  switch (mode) {
    case Mode::kGroundTruth:
      return "#1b9e77";
    case Mode::kSparse:
      return "#d95f02";
    case Mode::kAugmented:
      return "#7570b3";
  }
  return "#000000";
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace

std::string ReportCsv(const Report& report) {
  std::ostringstream os;
  os << "scene,mode,start_index,goal_index,seed,success,failure_reason,"
        "sim_time,path_length,relative_length,start_x,start_y,start_z,"
        "goal_x,goal_y,goal_z,samples\n";
  for (const RunRecord& r : report.runs) {
    os << r.scene_id << ',' << ToString(r.mode) << ',' << r.start_index << ','
       << r.goal_index << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
       << ToString(r.failure) << ',' << Num(r.sim_time) << ','
       << Num(r.path_length) << ',' << Num(r.relative_length);
    for (int a = 0; a < 3; ++a) os << ',' << Num(r.start[a]);
    for (int a = 0; a < 3; ++a) os << ',' << Num(r.goal[a]);
    os << ',' << r.samples.size() << '\n';
  }
  return os.str();
}

nlohmann::json ReportJson(const Report& report) {
  json modes = json::array();
  for (Mode m : report.modes) modes.push_back(ToString(m));
  json aggregates = json::array();
  for (const ModeAggregate& a : report.aggregates) {
    aggregates.push_back({{"mode", ToString(a.mode)},
                          {"runs", a.runs},
                          {"successes", a.successes},
                          {"success_rate", a.success_rate},
                          {"collisions", a.collisions},
                          {"timeouts", a.timeouts},
                          {"planner_stuck", a.stuck},
                          {"common_count", a.common_count},
                          {"mean_path_length", a.mean_path_length},
                          {"mean_relative_length", a.mean_relative_length},
                          {"mean_time", a.mean_time}});
  }
  json runs = json::array();
  for (const RunRecord& r : report.runs) {
    json samples = json::array();
    for (const TrajectorySample& s : r.samples) {
      samples.push_back({s.t, s.position.x(), s.position.y(), s.position.z()});
    }
    runs.push_back({{"scene", r.scene_id},
                    {"mode", ToString(r.mode)},
                    {"start_index", r.start_index},
                    {"goal_index", r.goal_index},
                    {"seed", r.seed},
                    {"start", Vec(r.start)},
                    {"goal", Vec(r.goal)},
                    {"success", r.success},
                    {"failure_reason", ToString(r.failure)},
                    {"sim_time", r.sim_time},
                    {"path_length", r.path_length},
                    {"relative_length", r.relative_length},
                    {"samples", samples}});
  }
  return {{"config_digest", report.config_digest},
          {"modes", modes},
          {"aggregates", aggregates},
          {"runs", runs}};
}

Report ReportFromJson(const nlohmann::json& doc) {
  Report report;
  try {
    report.config_digest = doc.at("config_digest").get<std::string>();
    for (const json& m : doc.at("modes")) {
      report.modes.push_back(ParseMode(m.get<std::string>()));
    }
    for (const json& j : doc.at("runs")) {
      RunRecord r;
      r.scene_id = j.at("scene").get<std::string>();
      r.mode = ParseMode(j.at("mode").get<std::string>());
      r.start_index = j.at("start_index").get<std::size_t>();
      r.goal_index = j.at("goal_index").get<std::size_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.start = VecFrom(j.at("start"));
      r.goal = VecFrom(j.at("goal"));
      r.success = j.at("success").get<bool>();
      r.failure = ParseFailure(j.at("failure_reason").get<std::string>());
      r.sim_time = j.at("sim_time").get<double>();
      r.path_length = j.at("path_length").get<double>();
      r.relative_length = j.at("relative_length").get<double>();
      for (const json& s : j.at("samples")) {
        r.samples.push_back({s.at(0).get<double>(),
                             Vec3(s.at(1).get<double>(), s.at(2).get<double>(),
                                  s.at(3).get<double>())});
      }
      report.runs.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("malformed report: ") + e.what());
  }
  Aggregate(report);
  return report;
}

std::string ReportSvg(const Report& report, const Scene& scene) {
  constexpr double kScale = 50.0;
  constexpr double kMargin = 10.0;
  const Vec3 lo = scene.bounds.min;
  const Vec3 size = scene.bounds.Size();
  const double width = size.x() * kScale + 2 * kMargin;
  const double height = size.y() * kScale + 2 * kMargin;
  // World y grows upward; SVG y grows downward.
  auto sx = [&](double x) { return Num(kMargin + (x - lo.x()) * kScale); };
  auto sy = [&](double y) {
    return Num(kMargin + (lo.y() + size.y() - y) * kScale);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Num(width)
     << "\" height=\"" << Num(height) << "\">\n";
  os << "<rect x=\"" << sx(lo.x()) << "\" y=\"" << sy(lo.y() + size.y())
     << "\" width=\"" << Num(size.x() * kScale) << "\" height=\""
     << Num(size.y() * kScale) << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const Cylinder& c : scene.cylinders) {
    os << "<circle cx=\"" << sx(c.center.x()) << "\" cy=\"" << sy(c.center.y())
       << "\" r=\"" << Num(c.radius * kScale) << "\" fill=\"#999999\"/>\n";
  }
  for (const Box& b : scene.boxes) {
    os << "<rect x=\"" << sx(b.extent.min.x()) << "\" y=\""
       << sy(b.extent.max.y()) << "\" width=\""
       << Num((b.extent.max.x() - b.extent.min.x()) * kScale)
       << "\" height=\"" << Num((b.extent.max.y() - b.extent.min.y()) * kScale)
       << "\" fill=\"#bbbbbb\"/>\n";
  }
  for (const RunRecord& r : report.runs) {
    os << "<polyline fill=\"none\" stroke=\"" << ModeColor(r.mode)
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      if (i > 0) os << ' ';
      os << sx(r.samples[i].position.x()) << ',' << sy(r.samples[i].position.y());
    }
    os << "\"/>\n";
  }
  for (const RunRecord& r : report.runs) {
    os << "<circle cx=\"" << sx(r.start.x()) << "\" cy=\"" << sy(r.start.y())
       << "\" r=\"4\" fill=\"green\"/>\n";
    os << "<circle cx=\"" << sx(r.goal.x()) << "\" cy=\"" << sy(r.goal.y())
       << "\" r=\"4\" fill=\"red\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string ReportDigest(const Report& report) {
  return Fnv1aHex(ReportCsv(report) + ReportJson(report).dump());
}

void EmitReport(const Report& report, const Scene& scene,
                const std::filesystem::path& dir, const ReportFiles& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
  if (files.csv) WriteText(dir / "runs.csv", ReportCsv(report));
  if (files.json) WriteText(dir / "report.json", ReportJson(report).dump(2) + "\n");
  if (files.svg) WriteText(dir / "trajectories.svg", ReportSvg(report, scene));
}

}  // namespace augplan
