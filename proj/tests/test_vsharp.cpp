#include <gtest/gtest.h>

#include <cstring>
#include <functional>

#include "cmr/baselines.hpp"
#include "cmr/metrics.hpp"
#include "cmr/phantom.hpp"
#include "cmr/sampling.hpp"
#include "cmr/vsharp.hpp"
#include "oracles.hpp"

using cmr::Complex;

namespace {

// Seeded 64x64 phantom, equispaced R=4, 1% noise.
constexpr double kZeroFilledSsim = 0.558263864081;
constexpr double kVsharpSsim = 0.738547673621;

bool matches_on_mask(const cmr::MultiCoilKSpace& a, const cmr::MultiCoilKSpace& y,
                     const cmr::SamplingMask& m) {
  const std::size_t n = y.rows() * y.cols();
  for (std::size_t k = 0; k < y.coils(); ++k) {
    for (std::size_t f = 0; f < y.frames(); ++f) {
      for (std::size_t i = 0; i < n; ++i) {
        if (m.frame(f)[i] &&
            std::memcmp(&a.plane(k, f)[i], &y.plane(k, f)[i], sizeof(Complex)) != 0) {
          return false;
        }
      }
    }
  }
  return true;
}

struct Instance {
  cmr::AcquisitionOperator op;
  cmr::MultiCoilKSpace y;
};

Instance random_instance(std::size_t nc, std::size_t nf, std::size_t n, double keep, std::uint64_t seed) {
  cmr::AcquisitionOperator op(oracle::random_maps(nc, n, n, seed), oracle::random_mask(nf, n, n, keep, seed + 1));
  auto y = cmr::forward(oracle::random_image(nf, n, n, seed + 2), op);
  return {std::move(op), std::move(y)};
}

}  // namespace

TEST(Initialize, DefaultsFollowAdjoint) {
  const auto inst = random_instance(2, 2, 6, 0.5, 1);
  const auto s = cmr::initialize(inst.y, inst.op, {}, std::nullopt);
  const auto x0 = cmr::adjoint(inst.y, inst.op);
  EXPECT_EQ(s.x0, x0);
  EXPECT_EQ(s.z0, x0);
  for (const auto& v : s.u0.flat()) EXPECT_EQ(v, Complex{});
}

TEST(Initialize, OverrideOnlyReplacesZ) {
  const auto inst = random_instance(2, 2, 6, 0.5, 2);
  const auto r = oracle::random_image(2, 6, 6, 9);
  cmr::VSharpConfig cfg;
  cfg.u_init = cmr::UInit::scaled_adjoint;
  const auto s = cmr::initialize(inst.y, inst.op, cfg, r);
  EXPECT_EQ(s.z0, r);
  EXPECT_EQ(s.x0, cmr::adjoint(inst.y, inst.op));
  for (std::size_t i = 0; i < s.u0.size(); ++i) EXPECT_EQ(s.u0.flat()[i], 1e-3 * s.x0.flat()[i]);
  EXPECT_THROW(cmr::initialize(inst.y, inst.op, cfg, oracle::random_image(1, 6, 6, 1)),
               cmr::DimensionError);
}

TEST(Initialize, ZeroDataGivesZeroState) {
  const auto inst = random_instance(2, 1, 4, 0.5, 3);
  cmr::VSharpConfig cfg;
  cfg.u_init = cmr::UInit::scaled_adjoint;
  const auto s = cmr::initialize(cmr::MultiCoilKSpace(2, 1, 4, 4), inst.op, cfg, std::nullopt);
  for (const auto* a : {&s.x0, &s.z0, &s.u0}) {
    for (const auto& v : a->flat()) EXPECT_EQ(v, Complex{});
  }
}

TEST(Config, Validation) {
  cmr::VSharpConfig c;
  EXPECT_DOUBLE_EQ(c.resolved_step(), 0.5);
  c.rho = 3.0;
  EXPECT_DOUBLE_EQ(c.resolved_step(), 0.25);
  c.step_size = 0.1;
  EXPECT_DOUBLE_EQ(c.resolved_step(), 0.1);
  const std::vector<std::function<void(cmr::VSharpConfig&)>> breakers = {
      [](cmr::VSharpConfig& v) { v.iterations = 0; }, [](cmr::VSharpConfig& v) { v.x_steps = 0; },
      [](cmr::VSharpConfig& v) { v.rho = 0.0; }, [](cmr::VSharpConfig& v) { v.step_size = -1.0; }};
  for (const auto& bad : breakers) {
    cmr::VSharpConfig v;
    bad(v);
    EXPECT_THROW(v.validate(), cmr::InvalidParameterError);
  }
  EXPECT_EQ(cmr::parse_u_init("scaled_adjoint"), cmr::UInit::scaled_adjoint);
  EXPECT_THROW(cmr::parse_u_init("learned"), cmr::InvalidParameterError);
}

TEST(XUpdate, SingleExactStepWithVanishingPenalty) {
  const cmr::AcquisitionOperator op(oracle::random_maps(3, 6, 6, 4), cmr::SamplingMask(2, 6, 6, 1));
  const auto y = oracle::random_kspace(3, 2, 6, 6, 5);
  cmr::VSharpConfig cfg;
  cfg.rho = 1e-12;
  cfg.step_size = 1.0;
  cfg.x_steps = 1;
  const cmr::DynamicImage zero(2, 6, 6);
  const auto x = cmr::x_update(zero, zero, zero, y, op, cfg);
  EXPECT_LT(oracle::rel_diff(x.flat(), cmr::adjoint(y, op).flat()), 1e-6);
}

TEST(XUpdate, ShrinksTowardZeroWithoutData) {
  const auto inst = random_instance(2, 1, 6, 0.5, 6);
  cmr::VSharpConfig cfg;
  cfg.x_steps = 1;
  const cmr::DynamicImage zero(1, 6, 6);
  auto x = oracle::random_image(1, 6, 6, 7);
  for (int step = 0; step < 10; ++step) {
    const auto next = cmr::x_update(x, zero, zero, cmr::MultiCoilKSpace(2, 1, 6, 6), inst.op, cfg);
    EXPECT_LT(cmr::norm2(next.flat()), cmr::norm2(x.flat()));
    x = next;
  }
}

TEST(XUpdate, ConvergesToDenseNormalEquationSolve) {
  const auto maps = oracle::random_maps(2, 8, 8, 11);
  const auto mask = oracle::random_mask(1, 8, 8, 0.5, 12);
  const cmr::AcquisitionOperator op(maps, mask);
  const auto y = cmr::forward(oracle::random_image(1, 8, 8, 13), op);
  const auto z = oracle::random_image(1, 8, 8, 14);
  const auto u = oracle::random_image(1, 8, 8, 15);
  cmr::VSharpConfig cfg;
  cfg.rho = 0.7;
  cfg.x_steps = 200;
  const auto x = cmr::x_update(cmr::DynamicImage(1, 8, 8), z, u, y, op, cfg);

  const auto A = oracle::acquisition_matrix(maps, mask, 0);
  auto rhs = oracle::adjoint_apply(A, std::vector<Complex>(y.flat().begin(), y.flat().end()));
  for (std::size_t i = 0; i < 64; ++i) rhs[i] += cfg.rho * z.flat()[i] - u.flat()[i];
  const auto want = oracle::solve(oracle::gram(A, cfg.rho), rhs);
  EXPECT_LT(oracle::rel_diff(x.flat(), want), 1e-5);
}

TEST(XUpdate, DivergenceIsReported) {
  const auto inst = random_instance(2, 1, 6, 1.0, 8);
  cmr::VSharpConfig cfg;
  cfg.step_size = 1e3;
  cfg.x_steps = 400;
  const auto x0 = cmr::adjoint(inst.y, inst.op);
  EXPECT_THROW(cmr::x_update(x0, x0, x0, inst.y, inst.op, cfg), cmr::DivergenceError);
}

TEST(UUpdate, Arithmetic) {
  const auto x = oracle::random_image(1, 4, 4, 1);
  const auto u = oracle::random_image(1, 4, 4, 2);
  EXPECT_EQ(cmr::u_update(u, x, x, 2.0), u);

  cmr::DynamicImage zero(1, 2, 2), xn(1, 2, 2);
  xn.flat()[3] = 1.0;
  EXPECT_EQ(cmr::u_update(zero, xn, zero, 2.0).flat()[3], Complex(2.0));

  const auto z = oracle::random_image(1, 4, 4, 3);
  const auto x2 = oracle::random_image(1, 4, 4, 4);
  const auto twice = cmr::u_update(cmr::u_update(u, x, z, 0.5), x2, z, 0.5);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Complex want = u.flat()[i] + 0.5 * (x.flat()[i] - z.flat()[i]) + 0.5 * (x2.flat()[i] - z.flat()[i]);
    EXPECT_NEAR(std::abs(twice.flat()[i] - want), 0.0, 1e-15);
  }
}

TEST(Reconstruct, FullSamplingRecoversAdjoint) {
  const cmr::AcquisitionOperator op(oracle::random_maps(3, 8, 8, 1), cmr::SamplingMask(2, 8, 8, 1));
  const auto y = oracle::random_kspace(3, 2, 8, 8, 2);
  cmr::VSharpConfig cfg;
  cfg.denoiser = {cmr::DenoiserKind::identity, 0.0, 20, 1};
  const auto trace = cmr::reconstruct(y, op, cfg);
  const auto a = cmr::adjoint(y, op);
  EXPECT_LE(cmr::nmse(trace.iterates.back().image.flat(), a.flat()), 1e-4);
}

TEST(Reconstruct, ZeroDataStaysZero) {
  const auto inst = random_instance(2, 2, 6, 0.5, 3);
  const auto trace = cmr::reconstruct(cmr::MultiCoilKSpace(2, 2, 6, 6), inst.op, {});
  for (const auto& it : trace.iterates) {
    for (const auto& v : it.image.flat()) EXPECT_EQ(v, Complex{});
  }
}

TEST(Reconstruct, TraceShapeDataConsistencyAndDeterminism) {
  const auto inst = random_instance(3, 2, 8, 0.4, 5);
  cmr::VSharpConfig cfg;
  cfg.iterations = 5;
  cfg.x_steps = 3;
  const auto a = cmr::reconstruct(inst.y, inst.op, cfg);
  ASSERT_EQ(a.iterates.size(), 5u);
  ASSERT_EQ(a.residual_history.size(), 5u);
  EXPECT_EQ(a.z0, cmr::adjoint(inst.y, inst.op));
  for (const auto& it : a.iterates) {
    EXPECT_EQ(it.image.shape(), a.z0.shape());
    EXPECT_EQ(it.kspace.shape(), inst.y.shape());
    EXPECT_TRUE(matches_on_mask(it.kspace, inst.y, inst.op.mask()));
  }
  const auto b = cmr::reconstruct(inst.y, inst.op, cfg);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(a.iterates[j].image, b.iterates[j].image);
    EXPECT_EQ(a.iterates[j].kspace, b.iterates[j].kspace);
  }
  EXPECT_EQ(a.residual_history, b.residual_history);
  EXPECT_EQ(cmr::reconstruct_final(inst.y, inst.op, cfg), a.iterates.back().image);
}

TEST(Reconstruct, ResidualNonIncreasingWithIdentityPrior) {
  for (bool dc : {false, true}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto inst = random_instance(2, 2, 8, 0.4, 40 + s);
      cmr::VSharpConfig cfg;
      cfg.denoiser = {cmr::DenoiserKind::identity, 0.0, 20, 1};
      cfg.per_iterate_dc = dc;
      const auto t = cmr::reconstruct(inst.y, inst.op, cfg);
      for (std::size_t j = 1; j < t.residual_history.size(); ++j) {
        EXPECT_LE(t.residual_history[j], t.residual_history[j - 1] * (1 + 1e-12) + 1e-15)
            << "dc=" << dc << " seed=" << s << " j=" << j;
      }
    }
  }
}

TEST(Reconstruct, WaveletPriorBeatsZeroFilledOnPhantom) {
  cmr::PhantomSpec ps;
  ps.rows = ps.cols = 64;
  ps.frames = 4;
  ps.coils = 4;
  const auto x = cmr::generate_phantom(ps);
  const auto maps = cmr::coil_maps(ps);
  cmr::MaskSpec ms;
  ms.acceleration = 4;
  ms.acs_fraction = 0.08;
  ms.frames = 4;
  ms.rows = ms.cols = 64;
  const auto mask = cmr::generate_mask(ms);
  const auto y = cmr::simulate(x, maps, mask, 0.01, 0);
  const cmr::AcquisitionOperator op(maps, mask);
  cmr::VSharpConfig cfg;
  cfg.denoiser = {cmr::DenoiserKind::wavelet_soft_threshold, 1e-3, 20, 3};
  const double zf = cmr::evaluate_volume(cmr::zero_filled(y, op), x).ssim;
  const double vs = cmr::evaluate_volume(cmr::reconstruct_final(y, op, cfg), x).ssim;
  RecordProperty("zero_filled_ssim", std::to_string(zf));
  RecordProperty("vsharp_ssim", std::to_string(vs));
  EXPECT_GT(vs, zf);
  EXPECT_NEAR(zf, kZeroFilledSsim, 1e-6);
  EXPECT_NEAR(vs, kVsharpSsim, 1e-6);
}
