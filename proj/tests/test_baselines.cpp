#include <gtest/gtest.h>

#include "cmr/baselines.hpp"
#include "cmr/metrics.hpp"
#include "cmr/phantom.hpp"
#include "cmr/sampling.hpp"
#include "oracles.hpp"

using cmr::Complex;

namespace {

constexpr double kAliasedSsim = 0.558317007598;

cmr::MaskSpec equispaced(std::size_t n, int r, std::size_t nf) {
  cmr::MaskSpec ms;
  ms.acceleration = r;
  ms.acs_fraction = 0.08;
  ms.frames = nf;
  ms.rows = ms.cols = n;
  return ms;
}

}  // namespace

TEST(ZeroFilled, FullSamplingRecoversImage) {
  const auto maps = oracle::random_maps(4, 8, 8, 1);
  const cmr::AcquisitionOperator op(maps, cmr::SamplingMask(2, 8, 8, 1));
  const auto x = oracle::random_image(2, 8, 8, 2);
  EXPECT_LT(oracle::rel_diff(cmr::zero_filled(cmr::forward(x, op), op).flat(), x.flat()), 1e-6);
  for (const auto out = cmr::zero_filled(cmr::MultiCoilKSpace(4, 2, 8, 8), op); const auto& v : out.flat()) {
    EXPECT_EQ(v, Complex{});
  }
}

TEST(ZeroFilled, AliasingLowersSsimOnPhantom) {
  cmr::PhantomSpec ps;
  ps.rows = ps.cols = 64;
  ps.frames = 4;
  ps.coils = 4;
  const auto x = cmr::generate_phantom(ps);
  const auto maps = cmr::coil_maps(ps);
  const auto ms = equispaced(64, 4, 4);
  const auto mask = cmr::generate_mask(ms);
  const double aliased =
      cmr::evaluate_volume(cmr::zero_filled(cmr::simulate(x, maps, mask, 0, 0), cmr::AcquisitionOperator(maps, mask)), x).ssim;
  const cmr::SamplingMask full(4, 64, 64, 1);
  const double clean =
      cmr::evaluate_volume(cmr::zero_filled(cmr::simulate(x, maps, full, 0, 0), cmr::AcquisitionOperator(maps, full)), x).ssim;
  RecordProperty("aliased_ssim", std::to_string(aliased));
  EXPECT_LT(aliased, clean);
  EXPECT_NEAR(clean, 1.0, 1e-9);
  EXPECT_NEAR(aliased, kAliasedSsim, 1e-6);
}

TEST(CgSense, FullSamplingWithoutDampingIsAdjoint) {
  const cmr::AcquisitionOperator op(oracle::random_maps(3, 8, 8, 1), cmr::SamplingMask(2, 8, 8, 1));
  const auto y = oracle::random_kspace(3, 2, 8, 8, 2);
  const auto x = cmr::cg_sense(y, op, {0.0, 15, 1e-6});
  EXPECT_LT(oracle::rel_diff(x.flat(), cmr::adjoint(y, op).flat()), 1e-6);
}

TEST(CgSense, ZeroDataGivesZero) {
  const cmr::AcquisitionOperator op(oracle::random_maps(2, 8, 8, 1), oracle::random_mask(1, 8, 8, 0.5, 2));
  for (const auto out = cmr::cg_sense(cmr::MultiCoilKSpace(2, 1, 8, 8), op, {}); const auto& v : out.flat()) {
    EXPECT_EQ(v, Complex{});
  }
}

TEST(CgSense, MatchesDenseSolve) {
  const auto maps = oracle::random_maps(2, 8, 8, 3);
  cmr::MaskSpec ms = equispaced(8, 2, 1);
  ms.acs_fraction = 0.0;
  const auto mask = cmr::generate_mask(ms);
  const cmr::AcquisitionOperator op(maps, mask);
  const auto y = cmr::forward(oracle::random_image(1, 8, 8, 4), op);
  const double mu = 1e-2;
  const auto x = cmr::cg_sense(y, op, {mu, 200, 1e-14});
  const auto A = oracle::acquisition_matrix(maps, mask, 0);
  const auto want = oracle::solve(oracle::gram(A, mu),
                                  oracle::adjoint_apply(A, {y.flat().begin(), y.flat().end()}));
  EXPECT_LT(oracle::rel_diff(x.flat(), want), 1e-5);
}

TEST(CgSense, ResidualNonIncreasing) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const cmr::AcquisitionOperator op(oracle::random_maps(3, 8, 8, s), oracle::random_mask(2, 8, 8, 0.4, s + 100));
    const auto y = cmr::forward(oracle::random_image(2, 8, 8, s + 200), op);
    std::vector<double> res;
    cmr::cg_sense(y, op, {1e-2, 30, 1e-12}, &res);
    ASSERT_FALSE(res.empty());
    for (std::size_t i = 1; i < res.size(); ++i) {
      EXPECT_LE(res[i], res[i - 1] * (1 + 1e-12)) << "seed " << s << " iteration " << i;
    }
  }
}

TEST(CgSense, ScaleEquivariant) {
  const cmr::AcquisitionOperator op(oracle::random_maps(2, 8, 8, 5), oracle::random_mask(2, 8, 8, 0.5, 6));
  const auto y = cmr::forward(oracle::random_image(2, 8, 8, 7), op);
  const Complex c(-0.7, 2.2);
  auto cy = y;
  for (auto& v : cy.flat()) v *= c;
  const auto a = cmr::cg_sense(y, op, {});
  const auto b = cmr::cg_sense(cy, op, {});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(std::abs(b.flat()[i] - c * a.flat()[i]), 0.0, 1e-9);
  }
}

TEST(CgSense, InvalidOptions) {
  const cmr::AcquisitionOperator op(oracle::random_maps(1, 4, 4, 5), cmr::SamplingMask(1, 4, 4, 1));
  const cmr::MultiCoilKSpace y(1, 1, 4, 4);
  EXPECT_THROW(cmr::cg_sense(y, op, {-1.0, 5, 1e-6}), cmr::InvalidParameterError);
  EXPECT_THROW(cmr::cg_sense(y, op, {0.0, 0, 1e-6}), cmr::InvalidParameterError);
}
