#include "augplan/report.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace augplan {
namespace {

std::size_t CountOf(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

RunRecord MakeRun(Mode mode, std::size_t s, std::size_t g, bool ok, double len) {
  RunRecord r;
  r.scene_id = "forest";
  r.mode = mode;
  r.start_index = s;
  r.goal_index = g;
  r.seed = 17 + s;
  r.start = Vec3(1, 1, 1);
  r.goal = Vec3(1 + len / 1.25, 1, 1);
  r.success = ok;
  r.failure = ok ? FailureReason::kNone : FailureReason::kTimeout;
  r.sim_time = len / 1.5;
  r.path_length = len;
  r.relative_length = 1.25;
  for (int i = 0; i < 4; ++i) {
    r.samples.push_back({0.1 * i, Vec3(1 + 0.3 * i, 1 + 0.01 * i, 1)});
  }
  return r;
}

Report ThreeRuns() {
  Report report;
  report.config_digest = "0123456789abcdef";
  report.modes = {Mode::kGroundTruth, Mode::kAugmented};
  report.runs = {MakeRun(Mode::kGroundTruth, 0, 1, true, 5.0),
                 MakeRun(Mode::kAugmented, 0, 1, true, 5.5),
                 MakeRun(Mode::kAugmented, 1, 0, false, 1.0 / 3.0)};
  Aggregate(report);
  return report;
}

Scene SmallScene() {
  Scene scene;
  scene.bounds = {Vec3::Zero(), Vec3(10, 8, 3)};
  scene.cylinders.push_back({Vec2(3, 3), 0.5, 0.0, 2.0, 0.5});
  scene.boxes.push_back({Aabb{Vec3(6, 6, 0), Vec3(7, 7, 1)}, 0.4});
  return scene;
}

TEST(ReportCsvTest, EmptyReportIsHeaderOnly) {
  const std::string csv = ReportCsv(Report{});
  EXPECT_EQ(CountOf(csv, "\n"), 1u);
  EXPECT_EQ(csv.rfind("scene,mode,", 0), 0u);
}

TEST(ReportCsvTest, OneRowPerRun) {
  const std::string csv = ReportCsv(ThreeRuns());
  EXPECT_EQ(CountOf(csv, "\n"), 4u);
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  const auto columns = std::count(header.begin(), header.end(), ',');
  while (std::getline(lines, row)) {
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), columns);
  }
  EXPECT_NE(csv.find(",timeout,"), std::string::npos);
}

TEST(ReportJsonTest, AggregatesMatchRecomputation) {
  const Report report = ThreeRuns();
  const nlohmann::json doc = ReportJson(report);
  ASSERT_EQ(doc.at("runs").size(), 3u);
  ASSERT_EQ(doc.at("aggregates").size(), 2u);
  const Mode compared[] = {Mode::kGroundTruth, Mode::kAugmented};
  const auto expected = AggregateModes(report.runs, compared);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const nlohmann::json& a = doc.at("aggregates")[i];
    EXPECT_EQ(a.at("runs").get<std::size_t>(), expected[i].runs);
    EXPECT_EQ(a.at("successes").get<std::size_t>(), expected[i].successes);
    EXPECT_EQ(a.at("mean_path_length").get<double>(), expected[i].mean_path_length);
    EXPECT_EQ(a.at("common_count").get<std::size_t>(), 1u);
  }
  EXPECT_EQ(doc.at("aggregates")[1].at("success_rate").get<double>(), 0.5);
  EXPECT_EQ(doc.at("aggregates")[1].at("timeouts").get<std::size_t>(), 1u);
}

TEST(ReportJsonTest, RoundTripPreservesDigest) {
  const Report report = ThreeRuns();
  const Report back = ReportFromJson(nlohmann::json::parse(ReportJson(report).dump()));
  ASSERT_EQ(back.runs.size(), report.runs.size());
  for (std::size_t i = 0; i < back.runs.size(); ++i) {
    EXPECT_EQ(back.runs[i].path_length, report.runs[i].path_length);
    EXPECT_EQ(back.runs[i].failure, report.runs[i].failure);
    EXPECT_EQ(back.runs[i].samples.size(), report.runs[i].samples.size());
  }
  EXPECT_EQ(ReportDigest(back), ReportDigest(report));
  EXPECT_EQ(ReportCsv(back), ReportCsv(report));
}

TEST(ReportJsonTest, MalformedThrows) {
  EXPECT_THROW(ReportFromJson(nlohmann::json::object()), Error);
  nlohmann::json doc = ReportJson(ThreeRuns());
  doc["runs"][0]["failure_reason"] = "exploded";
  EXPECT_THROW(ReportFromJson(doc), Error);
}

TEST(ReportDigestTest, SensitiveToContent) {
  Report a = ThreeRuns();
  Report b = ThreeRuns();
  EXPECT_EQ(ReportDigest(a), ReportDigest(b));
  b.runs[0].samples[2].position.x() += 1e-12;
  EXPECT_NE(ReportDigest(a), ReportDigest(b));
  EXPECT_EQ(ReportDigest(a).size(), 16u);
}

TEST(ReportSvgTest, OnePolylinePerTrajectory) {
  const Report report = ThreeRuns();
  const std::string svg = ReportSvg(report, SmallScene());
  EXPECT_EQ(CountOf(svg, "<polyline"), report.runs.size());
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(EmitReportTest, WritesRequestedFiles) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "augplan_emit";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  EmitReport(ThreeRuns(), SmallScene(), dir, ReportFiles{true, true, false});
  EXPECT_TRUE(std::filesystem::exists(dir / "runs.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_FALSE(std::filesystem::exists(dir / "trajectories.svg"));
}

}  // namespace
}  // namespace augplan
