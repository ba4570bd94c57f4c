#include <benchmark/benchmark.h>

#include <cmath>

#include "cmr/arn.hpp"
#include "cmr/baselines.hpp"
#include "cmr/calibration.hpp"
#include "cmr/fourier.hpp"
#include "cmr/phantom.hpp"
#include "cmr/priors.hpp"
#include "cmr/sampling.hpp"
#include "cmr/vsharp.hpp"

namespace {

struct Problem {
  cmr::DynamicImage truth;
  cmr::MultiCoilKSpace y;
  cmr::AcquisitionOperator op;
};

Problem make_problem(std::size_t n, std::size_t frames, std::size_t coils) {
  cmr::PhantomSpec ps;
  ps.rows = ps.cols = n;
  ps.frames = frames;
  ps.coils = coils;
  cmr::MaskSpec ms;
  ms.scheme = cmr::Scheme::equispaced;
  ms.acceleration = 4;
  ms.acs_fraction = 0.08;
  ms.kt_mode = true;
  ms.frames = frames;
  ms.rows = ms.cols = n;
  auto x = cmr::generate_phantom(ps);
  auto maps = cmr::coil_maps(ps);
  auto mask = cmr::generate_mask(ms);
  auto y = cmr::simulate(x, maps, mask, 0.01, 0);
  cmr::AcquisitionOperator op(cmr::estimate_sensitivities(y, cmr::acs_region(ms)), mask);
  return {std::move(x), std::move(y), std::move(op)};
}

void BM_fft2c(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<cmr::Complex> plane(n * n);
  for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = {std::sin(0.1 * i), std::cos(0.3 * i)};
  for (auto _ : state) {
    cmr::fft2c_inplace(plane, n, n);
    benchmark::DoNotOptimize(plane.data());
  }
}
BENCHMARK(BM_fft2c)->Arg(64)->Arg(128)->Arg(96);

void BM_forward_adjoint(benchmark::State& state) {
  const Problem p = make_problem(128, 12, 8);
  for (auto _ : state) {
    auto g = cmr::data_gradient(p.truth, p.y, p.op);
    benchmark::DoNotOptimize(g.flat().data());
  }
}
BENCHMARK(BM_forward_adjoint)->Unit(benchmark::kMillisecond);

void BM_denoise(benchmark::State& state) {
  const Problem p = make_problem(128, 12, 1);
  const auto kind = static_cast<cmr::DenoiserKind>(state.range(0));
  const cmr::DenoiserSpec spec{kind, 0.01, 20, 3};
  const cmr::DynamicImage zero(p.truth.frames(), p.truth.rows(), p.truth.cols());
  for (auto _ : state) {
    auto z = cmr::denoise(p.truth, p.truth, zero, 1.0, spec);
    benchmark::DoNotOptimize(z.flat().data());
  }
  state.SetLabel(cmr::to_string(kind));
}
BENCHMARK(BM_denoise)
    ->Arg(static_cast<int>(cmr::DenoiserKind::wavelet_soft_threshold))
    ->Arg(static_cast<int>(cmr::DenoiserKind::tv))
    ->Unit(benchmark::kMillisecond);

void BM_cg_sense(benchmark::State& state) {
  const Problem p = make_problem(64, 4, 4);
  for (auto _ : state) {
    auto x = cmr::cg_sense(p.y, p.op, {});
    benchmark::DoNotOptimize(x.flat().data());
  }
}
BENCHMARK(BM_cg_sense)->Unit(benchmark::kMillisecond);

void BM_vsharp_arn(benchmark::State& state) {
  const Problem p = make_problem(64, 4, 4);
  const cmr::VSharpConfig vcfg;
  const cmr::ArnConfig acfg;
  for (auto _ : state) {
    auto z0 = cmr::init_z0(cmr::refine(p.y, p.op, acfg), p.op);
    auto x = cmr::reconstruct_final(p.y, p.op, vcfg, z0);
    benchmark::DoNotOptimize(x.flat().data());
  }
}
BENCHMARK(BM_vsharp_arn)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
