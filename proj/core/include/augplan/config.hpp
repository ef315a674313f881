#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "augplan/sim.hpp"
#include "augplan/world.hpp"

namespace augplan {

enum class WorldKind { kCylinderForest, kFourRooms };

struct WorldConfig {
  WorldKind kind = WorldKind::kCylinderForest;
  std::uint64_t seed = 0;
  /// Scene JSON to load instead of generating one.
  std::string file;
  ForestOptions forest;
  FourRoomsOptions four_rooms;

  bool operator==(const WorldConfig&) const = default;
};

/// Everything a pipeline run needs, resolved from preset, file and flags.
struct PipelineConfig {
  std::string preset;
  std::string output_dir;
  WorldConfig world;
  std::vector<Mode> modes{Mode::kGroundTruth, Mode::kSparse, Mode::kAugmented};
  bool ordered_pairs = true;
  ExperimentConfig experiment;

  /// Per-module checks plus: completer present iff Augmented is a mode;
  /// every sparsifier r_max <= ESDF d_cap.
  void Validate() const;
  /// Validate() plus: the map grid covers `scene`.
  void Validate(const Scene& scene) const;
  bool operator==(const PipelineConfig&) const = default;
};

/// Names accepted by MakePreset.
std::vector<std::string> PresetNames();
/// "cylinder-forest-paper", "four-rooms" or "mini-forest".
PipelineConfig MakePreset(std::string_view name);

nlohmann::json ToJson(const SparsifyConfig& cfg);
nlohmann::json ToJson(const IntegrationConfig& cfg);
nlohmann::json ToJson(const EsdfConfig& cfg);
nlohmann::json ToJson(const PlannerConfig& cfg);
nlohmann::json ToJson(const ExperimentConfig& cfg);
nlohmann::json ToJson(const PipelineConfig& cfg);

/// Overlays `doc` onto `cfg`. Keys absent from `doc` keep their value;
/// unknown keys and ill-typed values throw kValidation naming the key.
void ApplyJson(const nlohmann::json& doc, PipelineConfig& cfg);

/// Parses "a.b.c=value" into {"a":{"b":{"c":value}}}. The value is read as
/// JSON when possible, otherwise as a string.
nlohmann::json ParseAssignment(std::string_view assignment);

/// Starting point: the file's "preset" (if any, else the default config),
/// then the file, then each override in order.
PipelineConfig ResolveConfig(const nlohmann::json& file_doc,
                             const std::vector<nlohmann::json>& overrides);

PipelineConfig LoadConfigFile(const std::filesystem::path& path,
                              const std::vector<nlohmann::json>& overrides);

/// Builds (or loads) the scene and waypoints described by `world`.
std::pair<Scene, WaypointSet> BuildWorld(const WorldConfig& world);

/// FNV-1a digest of the canonical experiment JSON.
std::string ConfigDigest(const ExperimentConfig& cfg);

}  // namespace augplan
