#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "augplan/sim.hpp"
#include "augplan/world.hpp"

namespace augplan {

/// One row per run, header first.
std::string ReportCsv(const Report& report);

/// Full report: digest, aggregates and every run with its samples.
nlohmann::json ReportJson(const Report& report);
Report ReportFromJson(const nlohmann::json& doc);

/// Top-down view: obstacle footprints, one polyline per logged trajectory
/// colored by mode, start and goal markers.
std::string ReportSvg(const Report& report, const Scene& scene);

/// FNV-1a digest over the CSV and JSON renderings.
std::string ReportDigest(const Report& report);

struct ReportFiles {
  bool csv = true;
  bool json = true;
  bool svg = true;
};

/// Writes runs.csv, report.json and trajectories.svg into `dir`.
void EmitReport(const Report& report, const Scene& scene,
                const std::filesystem::path& dir, const ReportFiles& files = {});

}  // namespace augplan
