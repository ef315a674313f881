#include <vector>

#include <benchmark/benchmark.h>

#include "augplan/complete.hpp"
#include "augplan/config.hpp"
#include "augplan/esdf.hpp"
#include "augplan/plan.hpp"
#include "augplan/sparsify.hpp"
#include "augplan/tsdf.hpp"
#include "augplan/world.hpp"

namespace augplan {
namespace {

struct Fixture {
  Scene scene;
  Pose pose;
  RenderedFrame frame;
  DepthFrame sparse;

  Fixture() {
    scene = BuildWorld(MakePreset("cylinder-forest-paper").world).first;
    pose = Pose::LookingAlong(Vec3(1.5, 6.0, 1.0), 0.0);
    frame = Render(scene, pose, Intrinsics::Default());
    sparse = Sparsify(frame.depth, frame.gray, SparsifyConfig{});
  }
};

const Fixture& Shared() {
  static const Fixture fixture;
  return fixture;
}

void BM_Render(benchmark::State& state) {
  const Fixture& f = Shared();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Render(f.scene, f.pose, Intrinsics::Default()));
  }
}
BENCHMARK(BM_Render)->Unit(benchmark::kMillisecond);

void BM_Sparsify(benchmark::State& state) {
  const Fixture& f = Shared();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Sparsify(f.frame.depth, f.frame.gray, SparsifyConfig{}));
  }
}
BENCHMARK(BM_Sparsify)->Unit(benchmark::kMillisecond);

void BM_CompleteIdw(benchmark::State& state) {
  const Fixture& f = Shared();
  const CompleterSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Complete(spec, f.frame.gray, f.sparse));
  }
}
BENCHMARK(BM_CompleteIdw)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
  const Fixture& f = Shared();
  const auto points =
      BackprojectFrame(f.frame.depth, nullptr, f.pose, Intrinsics::Default(),
                       static_cast<int>(state.range(0)));
  const GridGeometry g = GridGeometry::Covering(f.scene.bounds, 0.1);
  for (auto _ : state) {
    TsdfGrid grid(g, 0.4);
    benchmark::DoNotOptimize(grid.Integrate(f.pose.translation, points, IntegrationConfig{}));
  }
}
BENCHMARK(BM_Integrate)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_EsdfFromObstacles(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GridGeometry g;
  g.dims = {n, n, n};
  Rng rng(3);
  std::vector<std::uint8_t> mask(g.VoxelCount());
  for (auto& m : mask) m = rng.Uniform() < 0.02;
  for (auto _ : state) {
    benchmark::DoNotOptimize(EsdfGrid::FromObstacles(g, mask, 7.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mask.size()));
}
BENCHMARK(BM_EsdfFromObstacles)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RrtStar(benchmark::State& state) {
  const Fixture& f = Shared();
  const GridGeometry g = GridGeometry::Covering(f.scene.bounds, 0.1);
  std::vector<std::uint8_t> mask(g.VoxelCount());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = Occupied(f.scene, g.Center(g.Unflatten(i)));
  }
  const EsdfGrid esdf = EsdfGrid::FromObstacles(g, mask, 7.0);
  RrtOptions opt;
  opt.iteration_budget = static_cast<int>(state.range(0));
  opt.seed = 1;
  const Vec3 start(1.0, 1.0, 1.0);
  const Vec3 goal(14.0, 11.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RrtStar(esdf, start, goal, opt));
  }
}
BENCHMARK(BM_RrtStar)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace augplan

BENCHMARK_MAIN();
