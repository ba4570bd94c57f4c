#include "cmr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmr {

namespace {

double dynamic_range_of(std::span<const double> ref) {
  const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
  double range = *hi - *lo;
  if (range == 0.0) range = std::abs(*hi);
  if (range == 0.0) throw UndefinedMetricError("ssim: reference is constant zero");
  return range;
}

// Mean windowed SSIM over valid positions of a (nf, ny, nx) volume with a
// (wf, w, w) window.
double windowed_ssim(const double* a, const double* b, std::size_t nf, std::size_t ny,
                     std::size_t nx, std::size_t wf, double range) {
  const std::size_t w = kSsimWindow;
  if (ny < w || nx < w || nf < wf) {
    throw DimensionError("ssim: image smaller than the window");
  }
  const double c1 = (kSsimK1 * range) * (kSsimK1 * range);
  const double c2 = (kSsimK2 * range) * (kSsimK2 * range);
  const double count = static_cast<double>(wf * w * w);
  const double inv = 1.0 / count;

  double total = 0.0;
  std::size_t positions = 0;
  for (std::size_t f0 = 0; f0 + wf <= nf; ++f0) {
    for (std::size_t r0 = 0; r0 + w <= ny; ++r0) {
      for (std::size_t c0 = 0; c0 + w <= nx; ++c0) {
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (std::size_t f = f0; f < f0 + wf; ++f) {
          for (std::size_t r = r0; r < r0 + w; ++r) {
            const std::size_t base = (f * ny + r) * nx;
            for (std::size_t c = c0; c < c0 + w; ++c) {
              const double x = a[base + c], y = b[base + c];
              sa += x;
              sb += y;
              saa += x * x;
              sbb += y * y;
              sab += x * y;
            }
          }
        }
        const double ma = sa * inv, mb = sb * inv;
        const double va = (saa * inv - ma * ma);
        const double vb = (sbb * inv - mb * mb);
        const double cov = (sab * inv - ma * mb);
        const double num = (2.0 * (ma * mb) + c1) * (2.0 * cov + c2);
        const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        total += num / den;
        ++positions;
      }
    }
  }
  return total / static_cast<double>(positions);
}

double l1_magnitude_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double l1(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& v : a) s += std::abs(v);
  return s;
}

double l1_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

double ssim(const RealGrid& pred, const RealGrid& ref, std::optional<double> dynamic_range) {
  require_same_shape(pred, ref, "ssim");
  const double range = dynamic_range ? *dynamic_range : dynamic_range_of(ref.flat());
  return windowed_ssim(pred.data(), ref.data(), 1, ref.extent(0), ref.extent(1), 1, range);
}

double ssim3d(const RealVolume& pred, const RealVolume& ref, std::optional<double> dynamic_range) {
  require_same_shape(pred, ref, "ssim3d");
  if (ref.extent(0) < kSsimFrameWindow) {
    throw DimensionError("ssim3d: need at least 3 frames, got " + std::to_string(ref.extent(0)));
  }
  const double range = dynamic_range ? *dynamic_range : dynamic_range_of(ref.flat());
  return windowed_ssim(pred.data(), ref.data(), ref.extent(0), ref.extent(1), ref.extent(2),
                       kSsimFrameWindow, range);
}

double psnr(std::span<const double> pred, std::span<const double> ref) {
  if (pred.size() != ref.size()) throw DimensionError("psnr: length mismatch");
  double peak = 0.0;
  for (double v : ref) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw UndefinedMetricError("psnr: reference is all zero");
  double se = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) se += (pred[i] - ref[i]) * (pred[i] - ref[i]);
  const double mse = se / static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(peak / std::sqrt(mse));
}

double nmse(std::span<const double> pred, std::span<const double> ref) {
  if (pred.size() != ref.size()) throw DimensionError("nmse: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += (pred[i] - ref[i]) * (pred[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw UndefinedMetricError("nmse: reference has zero norm");
  return num / den;
}

double nmse(std::span<const Complex> pred, std::span<const Complex> ref) {
  if (pred.size() != ref.size()) throw DimensionError("nmse: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += std::norm(pred[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  if (den == 0.0) throw UndefinedMetricError("nmse: reference has zero norm");
  return num / den;
}

RealGrid frame_of(const RealVolume& v, std::size_t f) {
  auto s = v.slice(f);
  return RealGrid({v.extent(1), v.extent(2)}, std::vector<double>(s.begin(), s.end()));
}

double iterate_weight(int j, int n) {
  if (n <= 1) return 1.0;
  return std::pow(10.0, static_cast<double>(j - n) / static_cast<double>(n - 1));
}

namespace {

LossTerms image_terms(const DynamicImage& x, const MultiCoilKSpace& k, const RealVolume& x_star,
                      const MultiCoilKSpace& y_star, double y_star_l1, bool with_3d) {
  LossTerms t;
  const RealVolume mag = magnitude(x);
  require_same_shape(mag, x_star, "vsharp_loss");
  for (std::size_t f = 0; f < mag.extent(0); ++f) {
    const RealGrid p = frame_of(mag, f);
    const RealGrid r = frame_of(x_star, f);
    t.ssim += 1.0 - ssim(p, r);
    t.l1 += l1_magnitude_diff(p.flat(), r.flat());
  }
  require_same_shape(k, y_star, "vsharp_loss");
  t.kspace = l1_diff(k.flat(), y_star.flat()) / y_star_l1;
  if (with_3d) t.ssim3d = 1.0 - ssim3d(mag, x_star);
  return t;
}

}  // namespace

LossRecord vsharp_loss(const SolveTrace& trace, const MultiCoilKSpace& r, const RealVolume& x_star,
                       const MultiCoilKSpace& y_star, int n) {
  if (n < 1 || trace.iterates.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("vsharp_loss: trace holds " + std::to_string(trace.iterates.size()) +
                         " iterates, expected " + std::to_string(n));
  }
  const double y_star_l1 = l1(y_star.flat());
  if (y_star_l1 == 0.0) throw UndefinedMetricError("vsharp_loss: fully sampled k-space is zero");

  LossRecord rec;
  rec.ssim3d_included = x_star.extent(0) >= kSsimFrameWindow;
  rec.z0 = image_terms(trace.z0, r, x_star, y_star, y_star_l1, rec.ssim3d_included);
  rec.total = rec.z0.sum();
  for (int j = 1; j <= n; ++j) {
    const Iterate& it = trace.iterates[static_cast<std::size_t>(j - 1)];
    const double w = iterate_weight(j, n);
    rec.weights.push_back(w);
    rec.iterates.push_back(
        image_terms(it.image, it.kspace, x_star, y_star, y_star_l1, rec.ssim3d_included));
    rec.total += w * rec.iterates.back().sum();
  }
  return rec;
}

ReconReport evaluate_volume(const DynamicImage& pred, const RealVolume& ref, double wall_seconds) {
  const RealVolume mag = magnitude(pred);
  require_same_shape(mag, ref, "evaluate_volume");
  ReconReport rep;
  const std::size_t nf = ref.extent(0);
  double s = 0.0;
  for (std::size_t f = 0; f < nf; ++f) s += ssim(frame_of(mag, f), frame_of(ref, f));
  rep.ssim = s / static_cast<double>(nf);
  rep.ssim3d = nf >= kSsimFrameWindow ? ssim3d(mag, ref) : std::numeric_limits<double>::quiet_NaN();
  rep.psnr = psnr(mag.flat(), ref.flat());
  rep.nmse = nmse(mag.flat(), ref.flat());
  rep.wall_seconds = wall_seconds;
  return rep;
}

ReconReport evaluate_volume(const DynamicImage& pred, const DynamicImage& ref,
                            double wall_seconds) {
  return evaluate_volume(pred, magnitude(ref), wall_seconds);
}

}  // namespace cmr
