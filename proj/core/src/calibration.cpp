#include "cmr/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmr/fourier.hpp"

namespace cmr {

namespace {

// Symmetric Hann weights with nonzero end points.
std::vector<double> hann(std::size_t width) {
  std::vector<double> w(width);
  for (std::size_t i = 0; i < width; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i + 1) /
                                static_cast<double>(width + 1));
  }
  return w;
}

}  // namespace

SensitivityMaps estimate_sensitivities(const MultiCoilKSpace& y, const SamplingMask& acs_mask,
                                       double eps, const MapRefiner& refiner) {
  if (!(eps > 0.0)) throw InvalidParameterError("estimate_sensitivities: eps must be > 0");
  if (acs_mask.rows() != y.rows() || acs_mask.cols() != y.cols() || acs_mask.frames() < 1) {
    throw DimensionError("estimate_sensitivities: ACS mask " + shape_string(acs_mask) +
                         " does not match k-space " + shape_string(y));
  }
  const std::size_t nc = y.coils(), nf = y.frames(), ny = y.rows(), nx = y.cols();
  const std::size_t n = ny * nx;

  // Bounding box of the region.
  auto region = acs_mask.frame(0);
  std::size_t r0 = ny, r1 = 0, c0 = nx, c1 = 0;
  for (std::size_t r = 0; r < ny; ++r) {
    for (std::size_t c = 0; c < nx; ++c) {
      if (!region[r * nx + c]) continue;
      r0 = std::min(r0, r);
      r1 = std::max(r1, r + 1);
      c0 = std::min(c0, c);
      c1 = std::max(c1, c + 1);
    }
  }
  if (r1 == 0) throw CalibrationError("estimate_sensitivities: empty ACS region");

  const auto col_taper = hann(c1 - c0);
  const bool taper_rows = (r1 - r0) < ny;
  const auto row_taper = hann(r1 - r0);

  MultiCoilKSpace low(nc, 1, ny, nx);
  const double inv_nf = 1.0 / static_cast<double>(nf);
  for (std::size_t k = 0; k < nc; ++k) {
    auto dst = low.plane(k, 0);
    for (std::size_t f = 0; f < nf; ++f) {
      auto src = y.plane(k, f);
      for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
    }
    for (std::size_t r = 0; r < ny; ++r) {
      for (std::size_t c = 0; c < nx; ++c) {
        const std::size_t i = r * nx + c;
        if (!region[i]) {
          dst[i] = Complex{};
          continue;
        }
        double w = col_taper[c - c0] * inv_nf;
        if (taper_rows) w *= row_taper[r - r0];
        dst[i] *= w;
      }
    }
    ifft2c_inplace(dst, ny, nx);
  }

  std::vector<double> rss(n, 0.0);
  for (std::size_t k = 0; k < nc; ++k) {
    auto p = low.plane(k, 0);
    for (std::size_t i = 0; i < n; ++i) rss[i] += std::norm(p[i]);
  }
  double peak = 0.0;
  for (auto& v : rss) {
    v = std::sqrt(v);
    peak = std::max(peak, v);
  }

  SensitivityMaps maps(nc, ny, nx);
  for (std::size_t k = 0; k < nc; ++k) {
    auto src = low.plane(k, 0);
    auto dst = maps.map(k);
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] / (rss[i] + eps);
  }
  auto& support = maps.support();
  for (std::size_t i = 0; i < n; ++i) support[i] = (peak > 0.0 && rss[i] > 1e-3 * peak) ? 1 : 0;

  return refiner(std::move(maps));
}

}  // namespace cmr
