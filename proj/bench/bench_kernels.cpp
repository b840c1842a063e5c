// Serial reference kernels against the OpenMP versions on a default-rig view.

#include <benchmark/benchmark.h>

#include <random>

#include "voxproj/geometry.hpp"
#include "voxproj/projector.hpp"
#include "voxproj/volume.hpp"

using namespace voxproj;

namespace {

struct Fixture {
  VoxelGrid volume;
  SamplingGrid grid;
  ArgmaxMap argmax;
  ImageGradient upstream;

  explicit Fixture(std::size_t n) {
    const Dims3 dims{n, n, n};
    volume = VoxelGrid(dims);
    std::mt19937_64 rng(1);
    for (double& x : volume.values) x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const CameraIntrinsics k = build_intrinsics(default_focal(n), n, n);
    grid = build_sampling_grid(make_camera_view(default_rig()[3], k), n, dims);
    argmax = project(volume, grid).argmax;
    upstream = ImageGradient(n, n, 0.5);
  }
};

const Fixture& fixture(std::size_t n) {
  static Fixture f32(32);
  static Fixture f64(64);
  return n == 32 ? f32 : f64;
}

void BM_ResampleSerial(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::resample(f.volume, f.grid));
}

void BM_ResampleParallel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(resample(f.volume, f.grid));
}

void BM_ProjectSerial(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::project(f.volume, f.grid));
}

void BM_ProjectParallel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(project(f.volume, f.grid));
}

void BM_BackwardSerial(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::project_backward(f.volume, f.grid, f.argmax, f.upstream));
  }
}

void BM_BackwardParallel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_backward(f.volume, f.grid, f.argmax, f.upstream));
  }
}

}  // namespace

BENCHMARK(BM_ResampleSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResampleParallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProjectSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProjectParallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackwardSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackwardParallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
