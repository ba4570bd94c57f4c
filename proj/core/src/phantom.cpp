#include "cmr/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmr/fourier.hpp"
#include "cmr/rng.hpp"

namespace cmr {

namespace pc = phantom_constants;

void PhantomSpec::validate() const {
  if (rows < 32 || cols < 32) throw InvalidSpecError("phantom: rows and cols must be >= 32");
  if (frames < 2) throw InvalidSpecError("phantom: frames must be >= 2");
  if (coils < 1) throw InvalidSpecError("phantom: coils must be >= 1");
  if (!(beat_amplitude >= 0.0 && beat_amplitude < 0.5)) {
    throw InvalidSpecError("phantom: beat_amplitude must lie in [0, 0.5)");
  }
  if (!(noise_sigma >= 0.0)) throw InvalidSpecError("phantom: noise_sigma must be >= 0");
}

namespace {

double min_side(const PhantomSpec& s) { return static_cast<double>(std::min(s.rows, s.cols)); }

bool in_ellipse(double row, double col, double cy, double cx, double ay, double ax) {
  const double dy = (row - cy) / ay;
  const double dx = (col - cx) / ax;
  return dy * dy + dx * dx <= 1.0;
}

}  // namespace

double inner_radius(const PhantomSpec& spec, double t) {
  const double period = static_cast<double>(spec.period ? spec.period : spec.frames);
  return pc::kHeartInnerRadius * min_side(spec) *
         (1.0 + spec.beat_amplitude * std::sin(2.0 * std::numbers::pi * t / period));
}

double phantom_intensity(const PhantomSpec& spec, double t, double row, double col) {
  const double ny = static_cast<double>(spec.rows), nx = static_cast<double>(spec.cols);
  double v = 0.0;
  if (in_ellipse(row, col, 0.5 * ny, 0.5 * nx, pc::kTorsoSemiAxis * ny, pc::kTorsoSemiAxis * nx)) {
    v = pc::kTorsoIntensity;
  }
  if (in_ellipse(row, col, pc::kLeftLungCenter[0] * ny, pc::kLeftLungCenter[1] * nx,
                 pc::kLeftLungSemiAxes[0] * ny, pc::kLeftLungSemiAxes[1] * nx) ||
      in_ellipse(row, col, pc::kRightLungCenter[0] * ny, pc::kRightLungCenter[1] * nx,
                 pc::kRightLungSemiAxes[0] * ny, pc::kRightLungSemiAxes[1] * nx)) {
    v = pc::kLungIntensity;
  }
  const double dy = row - pc::kHeartCenter[0] * ny;
  const double dx = col - pc::kHeartCenter[1] * nx;
  const double d = std::sqrt(dy * dy + dx * dx);
  const double outer = pc::kHeartOuterRadius * min_side(spec);
  if (d < outer) v = d < inner_radius(spec, t) ? pc::kBloodIntensity : pc::kWallIntensity;
  return v;
}

DynamicImage generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const std::size_t nf = spec.frames, ny = spec.rows, nx = spec.cols;
  DynamicImage x(nf, ny, nx);
  const double ramp = pc::kPhaseRamp * std::numbers::pi / static_cast<double>(ny + nx);
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t r = 0; r < ny; ++r) {
      for (std::size_t c = 0; c < nx; ++c) {
        const double m = phantom_intensity(spec, static_cast<double>(f), static_cast<double>(r),
                                           static_cast<double>(c));
        x(f, r, c) = std::polar(m, ramp * static_cast<double>(r + c));
      }
    }
  }
  return x;
}

SensitivityMaps coil_maps(const PhantomSpec& spec) {
  if (spec.coils < 1) throw InvalidSpecError("coil_maps: need at least one coil");
  const std::size_t nc = spec.coils, ny = spec.rows, nx = spec.cols;
  SensitivityMaps maps(nc, ny, nx);
  const double cy = static_cast<double>(ny / 2), cx = static_cast<double>(nx / 2);
  const double radius = pc::kCoilCircle * min_side(spec) / 2.0;
  const double sigma = pc::kCoilSigma * min_side(spec);
  for (std::size_t k = 0; k < nc; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nc);
    const double ky = cy + radius * std::sin(phi), kx = cx + radius * std::cos(phi);
    const Complex phase = std::polar(1.0, phi);
    auto m = maps.map(k);
    for (std::size_t r = 0; r < ny; ++r) {
      for (std::size_t c = 0; c < nx; ++c) {
        const double dy = static_cast<double>(r) - ky, dx = static_cast<double>(c) - kx;
        m[r * nx + c] = phase * std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
      }
    }
  }
  const std::size_t n = ny * nx;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < nc; ++k) s += std::norm(maps.map(k)[i]);
    const double inv = 1.0 / std::sqrt(s);
    for (std::size_t k = 0; k < nc; ++k) maps.map(k)[i] *= inv;
  }
  return maps;
}

MultiCoilKSpace simulate_full(const DynamicImage& x, const SensitivityMaps& maps,
                              double noise_sigma, std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw InvalidParameterError("simulate: noise_sigma must be >= 0");
  MultiCoilKSpace y = expand(x, maps);
  if (noise_sigma == 0.0) return y;
  double mean_abs = 0.0;
  for (const auto& v : y.flat()) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(y.size());
  const double scale = noise_sigma * mean_abs / std::sqrt(2.0);
  Rng rng(seed);
  for (auto& v : y.flat()) {
    const double u1 = std::max(rng.uniform(), 1e-300);
    const double u2 = rng.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    v += Complex(radius * std::cos(angle), radius * std::sin(angle)) * scale;
  }
  return y;
}

MultiCoilKSpace apply_mask(MultiCoilKSpace y, const SamplingMask& mask) {
  if (mask.frames() != y.frames() || mask.rows() != y.rows() || mask.cols() != y.cols()) {
    throw DimensionError("apply_mask: mask " + shape_string(mask) + " vs k-space " +
                         shape_string(y));
  }
  for (std::size_t k = 0; k < y.coils(); ++k) {
    for (std::size_t f = 0; f < y.frames(); ++f) {
      auto p = y.plane(k, f);
      auto m = mask.frame(f);
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (!m[i]) p[i] = Complex{};
      }
    }
  }
  return y;
}

MultiCoilKSpace simulate(const DynamicImage& x, const SensitivityMaps& maps,
                         const SamplingMask& mask, double noise_sigma, std::uint64_t seed) {
  if (mask.frames() != x.frames() || mask.rows() != x.rows() || mask.cols() != x.cols()) {
    throw DimensionError("simulate: mask " + shape_string(mask) + " vs image " + shape_string(x));
  }
  return apply_mask(simulate_full(x, maps, noise_sigma, seed), mask);
}

MultiCoilKSpace augment(const MultiCoilKSpace& y, const AugmentFlags& flags) {
  const std::size_t nc = y.coils(), nf = y.frames(), ny = y.rows(), nx = y.cols();
  MultiCoilKSpace out(nc, nf, ny, nx);
  std::vector<Complex> img(ny * nx);
  for (std::size_t k = 0; k < nc; ++k) {
    for (std::size_t f = 0; f < nf; ++f) {
      auto src = y.plane(k, f);
      std::copy(src.begin(), src.end(), img.begin());
      ifft2c_inplace(img, ny, nx);
      const std::size_t dst_f = flags.time_reverse ? nf - 1 - f : f;
      auto dst = out.plane(k, dst_f);
      for (std::size_t r = 0; r < ny; ++r) {
        const std::size_t sr = flags.vflip ? ny - 1 - r : r;
        for (std::size_t c = 0; c < nx; ++c) {
          const std::size_t sc = flags.hflip ? nx - 1 - c : c;
          dst[r * nx + c] = img[sr * nx + sc];
        }
      }
      fft2c_inplace(dst, ny, nx);
    }
  }
  return out;
}

}  // namespace cmr
