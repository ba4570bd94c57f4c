#include <gtest/gtest.h>

#include <cmath>

#include "cmr/priors.hpp"
#include "oracles.hpp"

using cmr::Complex;

namespace {

cmr::DenoiserSpec spec(cmr::DenoiserKind k, double lambda, int levels = 1) {
  return {k, lambda, 20, levels};
}

cmr::DynamicImage zeros_like(const cmr::DynamicImage& x) {
  return cmr::DynamicImage(x.frames(), x.rows(), x.cols());
}

}  // namespace

TEST(Denoise, IdentityReturnsShiftedInput) {
  const auto x = oracle::random_image(2, 4, 6, 1);
  const auto u = oracle::random_image(2, 4, 6, 2);
  const auto out = cmr::denoise(x, x, u, 3.0, spec(cmr::DenoiserKind::identity, 5.0));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(out.flat()[i], x.flat()[i] + u.flat()[i]);
}

TEST(Denoise, ComplexShrinkageKeepsPhase) {
  cmr::DynamicImage x(1, 2, 2);
  x.flat()[0] = {3, 4};
  const auto out = cmr::denoise(x, x, zeros_like(x), 2.0, spec(cmr::DenoiserKind::soft_threshold, 2.0));
  EXPECT_NEAR(out.flat()[0].real(), 2.4, 1e-15);
  EXPECT_NEAR(out.flat()[0].imag(), 3.2, 1e-15);
  EXPECT_EQ(out.flat()[1], Complex{});
}

TEST(Denoise, SoftThresholdMatchesGridSearch) {
  for (double v : {-7.3, -1.0, -0.2, 0.0, 0.05, 0.5, 2.71, 9.5}) {
    for (double t : {0.1, 0.5, 1.0, 3.0}) {
      std::vector<Complex> z{v};
      cmr::soft_threshold_inplace(z, t);
      EXPECT_NEAR(z[0].real(), oracle::grid_soft_threshold(v, t), 1e-3) << v << " " << t;
    }
  }
}

TEST(Denoise, RejectsNonPositiveRho) {
  const auto x = oracle::random_image(1, 4, 4, 1);
  EXPECT_THROW(cmr::denoise(x, x, x, 0.0, spec(cmr::DenoiserKind::identity, 0)), cmr::InvalidParameterError);
  EXPECT_THROW(cmr::denoise(x, x, x, -1.0, spec(cmr::DenoiserKind::tv, 1)), cmr::InvalidParameterError);
  EXPECT_THROW(cmr::denoise(x, x, x, 1.0, spec(cmr::DenoiserKind::tv, -1)), cmr::InvalidParameterError);
}

TEST(Denoise, ShapeMismatchThrows) {
  const auto x = oracle::random_image(1, 4, 4, 1);
  const auto y = oracle::random_image(2, 4, 4, 1);
  EXPECT_THROW(cmr::denoise(x, x, y, 1.0, spec(cmr::DenoiserKind::identity, 0)), cmr::DimensionError);
}

TEST(Denoise, ZeroLambdaIsIdentityForEveryKind) {
  const auto x = oracle::random_image(2, 6, 10, 1);
  const auto u = oracle::random_image(2, 6, 10, 2);
  const auto ref = cmr::denoise(x, x, u, 1.5, spec(cmr::DenoiserKind::identity, 0));
  for (auto k : {cmr::DenoiserKind::soft_threshold, cmr::DenoiserKind::wavelet_soft_threshold,
                 cmr::DenoiserKind::tv}) {
    const auto out = cmr::denoise(x, x, u, 1.5, spec(k, 0.0, 2));
    EXPECT_LT(oracle::rel_diff(out.flat(), ref.flat()), 1e-12) << cmr::to_string(k);
  }
}

TEST(Denoise, ProximalMapsAreNonexpansive) {
  for (auto k : {cmr::DenoiserKind::identity, cmr::DenoiserKind::soft_threshold,
                 cmr::DenoiserKind::wavelet_soft_threshold}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto a = oracle::random_image(2, 8, 6, 2 * s);
      const auto b = oracle::random_image(2, 8, 6, 2 * s + 1);
      const auto zero = zeros_like(a);
      const auto da = cmr::denoise(a, a, zero, 1.0, spec(k, 0.3, 2));
      const auto db = cmr::denoise(b, b, zero, 1.0, spec(k, 0.3, 2));
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(da.flat()[i] - db.flat()[i]);
        den += std::norm(a.flat()[i] - b.flat()[i]);
      }
      EXPECT_LE(std::sqrt(num), std::sqrt(den) * (1 + 1e-12)) << cmr::to_string(k);
    }
  }
}

TEST(Denoise, KindNamesRoundTrip) {
  for (auto k : {cmr::DenoiserKind::identity, cmr::DenoiserKind::soft_threshold,
                 cmr::DenoiserKind::wavelet_soft_threshold, cmr::DenoiserKind::tv}) {
    EXPECT_EQ(cmr::parse_denoiser_kind(cmr::to_string(k)), k);
  }
  EXPECT_THROW(cmr::parse_denoiser_kind("unet"), cmr::InvalidParameterError);
}

TEST(Haar, ConstantBlock) {
  const cmr::ComplexGrid g({2, 2}, Complex(1.5));
  const auto h = cmr::haar2d(g, false);
  EXPECT_EQ(h(0, 0), Complex(3.0));
  EXPECT_EQ(h(0, 1), Complex{});
  EXPECT_EQ(h(1, 0), Complex{});
  EXPECT_EQ(h(1, 1), Complex{});
}

TEST(Haar, QuadrantConvention) {
  const cmr::ComplexGrid g({2, 2}, {1, 2, 3, 4});
  const auto h = cmr::haar2d(g, false);
  EXPECT_EQ(h(0, 0), Complex(5));
  EXPECT_EQ(h(0, 1), Complex(-1));
  EXPECT_EQ(h(1, 0), Complex(-2));
  EXPECT_EQ(h(1, 1), Complex(0));
}

TEST(Haar, OrthonormalAndInvertible) {
  for (auto [ny, nx] : {std::pair<std::size_t, std::size_t>{2, 2}, {8, 6}, {16, 16}}) {
    cmr::ComplexGrid g({ny, nx});
    oracle::fill_random(g, ny + nx);
    const auto h = cmr::haar2d(g, false);
    EXPECT_NEAR(cmr::norm2(h.flat()), cmr::norm2(g.flat()), 1e-12);
    EXPECT_LT(oracle::rel_diff(cmr::haar2d(h, true).flat(), g.flat()), 1e-12);
  }
}

TEST(Haar, OddSidesRejectedBySingleLevelTransform) {
  EXPECT_THROW(cmr::haar2d(cmr::ComplexGrid({3, 4}), false), cmr::DimensionError);
}

TEST(Haar, PaddedMultiLevelRoundTrip) {
  for (int levels : {1, 2, 3}) {
    cmr::ComplexGrid g({13, 10});
    oracle::fill_random(g, 7 + levels);
    const auto hc = cmr::haar2d_forward(g, levels);
    EXPECT_EQ(hc.coeffs.extent(0) % (1u << levels), 0u);
    EXPECT_EQ(hc.coeffs.extent(1) % (1u << levels), 0u);
    const auto back = cmr::haar2d_inverse(hc);
    ASSERT_EQ(back.shape(), g.shape());
    EXPECT_LT(oracle::rel_diff(back.flat(), g.flat()), 1e-12);
  }
}

TEST(Tv, ConstantImageUnchanged) {
  const cmr::ComplexGrid g({9, 7}, Complex(0.3, -0.8));
  for (double w : {0.01, 1.0, 100.0}) {
    const auto out = cmr::tv_prox(g, w, 20);
    for (const auto& v : out.flat()) EXPECT_NEAR(std::abs(v - Complex(0.3, -0.8)), 0.0, 1e-9);
  }
}

TEST(Tv, MatchesGridSearchOnFourPixels) {
  const std::vector<std::vector<double>> cases = {
      {1.0, 0.0, 0.0, 0.0}, {0.2, 0.9, -0.4, 0.5}, {2.0, 2.1, -1.0, 0.3}, {0.0, 1.0, 1.0, 0.0}};
  for (auto [ny, nx] : {std::pair<std::size_t, std::size_t>{2, 2}, {1, 4}}) {
    for (const auto& v : cases) {
      for (double w : {0.05, 0.2, 0.6}) {
        cmr::ComplexGrid g({ny, nx});
        for (std::size_t i = 0; i < 4; ++i) g.flat()[i] = v[i];
        const auto out = cmr::tv_prox(g, w, 2000);
        const auto want = oracle::grid_tv(v, ny, nx, w);
        for (std::size_t i = 0; i < 4; ++i) {
          EXPECT_NEAR(out.flat()[i].real(), want[i], 1e-3) << ny << "x" << nx << " w=" << w;
          EXPECT_NEAR(out.flat()[i].imag(), 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(Tv, ReducesVariation) {
  cmr::ComplexGrid g({16, 16});
  oracle::fill_random(g, 3);
  const auto out = cmr::tv_prox(g, 0.2, 20);
  EXPECT_LT(cmr::total_variation(out), cmr::total_variation(g));
}

TEST(Wavelet, ThresholdsEveryCoefficient) {
  cmr::ComplexGrid g({4, 4});
  oracle::fill_random(g, 12);
  auto hc = cmr::haar2d_forward(g, 2);
  cmr::soft_threshold_inplace(hc.coeffs.flat(), 0.25);
  const auto want = cmr::haar2d_inverse(hc);
  EXPECT_LT(oracle::rel_diff(cmr::wavelet_prox(g, 0.25, 2).flat(), want.flat()), 1e-15);
}
