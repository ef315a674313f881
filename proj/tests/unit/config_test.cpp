#include "augplan/config.hpp"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace augplan {
namespace {

using nlohmann::json;

TEST(PresetTest, StandardValues) {
  for (const std::string& name : PresetNames()) {
    const PipelineConfig cfg = MakePreset(name);
    const ExperimentConfig& e = cfg.experiment;
    EXPECT_EQ(e.sparsify.p, 0.25) << name;
    EXPECT_EQ(e.sparsify.r_max, 5.0);
    EXPECT_EQ(e.sparse_reference.p, 0.5);
    EXPECT_EQ(e.sparse_reference.r_max, 7.0);
    EXPECT_EQ(e.voxel_size, 0.1);
    EXPECT_EQ(e.integration.delta_trunc, 0.4);
    EXPECT_EQ(e.integration.w_pred, 0.1);
    EXPECT_EQ(e.esdf.t, 0.2);
    EXPECT_EQ(e.timeout, 40.0);
    EXPECT_TRUE(e.completer.has_value());
    EXPECT_NO_THROW(cfg.Validate()) << name;
  }
  EXPECT_EQ(MakePreset("cylinder-forest-paper").experiment.epsilon, 0.25);
  EXPECT_EQ(MakePreset("four-rooms").experiment.epsilon, 1.0);
  EXPECT_EQ(MakePreset("four-rooms").world.kind, WorldKind::kFourRooms);
  EXPECT_THROW(MakePreset("volcano"), Error);
}

TEST(PresetTest, WorldsBuildAndFit) {
  for (const std::string& name : PresetNames()) {
    const PipelineConfig cfg = MakePreset(name);
    const auto [scene, wps] = BuildWorld(cfg.world);
    EXPECT_GE(wps.points.size(), 2u);
    EXPECT_NO_THROW(cfg.Validate(scene)) << name;
  }
}

TEST(ValidateTest, AugmentedNeedsCompleter) {
  PipelineConfig cfg = MakePreset("mini-forest");
  ApplyJson(json{{"completer", nullptr}}, cfg);
  EXPECT_FALSE(cfg.experiment.completer.has_value());
  try {
    cfg.Validate();
    FAIL() << "expected validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
  ApplyJson(json{{"modes", {"GroundTruth", "Sparse"}}}, cfg);
  EXPECT_NO_THROW(cfg.Validate());
}

TEST(ValidateTest, RangeBeyondEsdfCap) {
  PipelineConfig cfg = MakePreset("mini-forest");
  ApplyJson(json{{"sparse_reference", {{"r_max", 9.0}}}}, cfg);
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(ApplyJsonTest, UnknownKeyAndBadTypeThrow) {
  PipelineConfig cfg = MakePreset("mini-forest");
  try {
    ApplyJson(json{{"sparsify", {{"q", 0.3}}}}, cfg);
    FAIL() << "expected validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("sparsify.q"), std::string::npos);
  }
  EXPECT_THROW(ApplyJson(json{{"sparsify", {{"p", "lots"}}}}, cfg), Error);
  EXPECT_THROW(ApplyJson(json{{"modes", {"Dense"}}}, cfg), Error);
}

TEST(ParseAssignmentTest, NestsAndTypes) {
  EXPECT_EQ(ParseAssignment("sparsify.p=0.3"), (json{{"sparsify", {{"p", 0.3}}}}));
  EXPECT_EQ(ParseAssignment("a.b.c=true"), (json{{"a", {{"b", {{"c", true}}}}}}));
  EXPECT_EQ(ParseAssignment("completer=idw:k=8,pow=2"),
            (json{{"completer", "idw:k=8,pow=2"}}));
  EXPECT_THROW(ParseAssignment("novalue"), Error);
}

TEST(ResolveTest, OverridesWinOverFile) {
  const json file = {{"preset", "mini-forest"}, {"sparsify", {{"p", 0.25}}}};
  const PipelineConfig base = ResolveConfig(file, {});
  EXPECT_EQ(base.experiment.sparsify.p, 0.25);
  EXPECT_EQ(base.world.forest.n_cylinders, 8);
  const PipelineConfig over = ResolveConfig(file, {json{{"sparsify", {{"p", 0.3}}}}});
  EXPECT_EQ(over.experiment.sparsify.p, 0.3);
  EXPECT_EQ(over.experiment.sparsify.r_max, base.experiment.sparsify.r_max);
  const PipelineConfig chained = ResolveConfig(
      file, {ParseAssignment("sparsify.p=0.3"), ParseAssignment("sparsify.p=0.4")});
  EXPECT_EQ(chained.experiment.sparsify.p, 0.4);
}

TEST(ResolveTest, RoundTripThroughJson) {
  for (const std::string& name : PresetNames()) {
    PipelineConfig cfg = MakePreset(name);
    cfg.experiment.planner.n_samples = 31;
    cfg.experiment.seed = 99;
    cfg.output_dir = "out";
    const PipelineConfig back = ResolveConfig(json::parse(ToJson(cfg).dump()), {});
    EXPECT_EQ(back, cfg) << name;
  }
}

TEST(ResolveTest, LoadsFile) {
  const auto path = std::filesystem::path(::testing::TempDir()) / "augplan_cfg.json";
  {
    std::ofstream out(path);
    out << R"({"preset": "four-rooms", "timeout": 20})";
  }
  const PipelineConfig cfg = LoadConfigFile(path, {});
  EXPECT_EQ(cfg.world.kind, WorldKind::kFourRooms);
  EXPECT_EQ(cfg.experiment.timeout, 20.0);
  EXPECT_THROW(LoadConfigFile(path.string() + ".missing", {}), Error);
}

TEST(DigestTest, StableAndSensitive) {
  const ExperimentConfig a = MakePreset("mini-forest").experiment;
  ExperimentConfig b = a;
  EXPECT_EQ(ConfigDigest(a), ConfigDigest(b));
  b.planner.weights.w_goal += 0.5;
  EXPECT_NE(ConfigDigest(a), ConfigDigest(b));
}

}  // namespace
}  // namespace augplan
