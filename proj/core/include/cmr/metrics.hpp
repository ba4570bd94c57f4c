#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmr/array.hpp"
#include "cmr/vsharp.hpp"

namespace cmr {

// SSIM constants: uniform window, k1, k2. Dynamic range comes from the
// reference (max - min) unless given explicitly. Local statistics use the
// population (1 / N) normalization, so a volume that is constant along the
// frame axis scores the same in 2D and 3D.
inline constexpr std::size_t kSsimWindow = 7;
inline constexpr std::size_t kSsimFrameWindow = 3;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

double ssim(const RealGrid& pred, const RealGrid& ref,
            std::optional<double> dynamic_range = std::nullopt);
double ssim3d(const RealVolume& pred, const RealVolume& ref,
              std::optional<double> dynamic_range = std::nullopt);

// 20 log10(max|ref| / sqrt(MSE)); +infinity when MSE is zero.
double psnr(std::span<const double> pred, std::span<const double> ref);
// ||pred - ref||^2 / ||ref||^2.
double nmse(std::span<const double> pred, std::span<const double> ref);
double nmse(std::span<const Complex> pred, std::span<const Complex> ref);

RealGrid frame_of(const RealVolume& v, std::size_t f);

// Weight of iterate j (1-based) out of n: 10^((j - n) / (n - 1)); 1 for n = 1.
double iterate_weight(int j, int n);

struct LossTerms {
  double ssim = 0.0;     // sum over frames of 1 - SSIM
  double l1 = 0.0;       // sum over frames of || |x_t| - x*_t ||_1
  double kspace = 0.0;   // ||k - y*||_1 / ||y*||_1
  double ssim3d = 0.0;   // 1 - SSIM3D, zero when fewer than 3 frames

  double sum() const { return ssim + l1 + kspace + ssim3d; }
};

struct LossRecord {
  LossTerms z0;
  std::vector<LossTerms> iterates;
  std::vector<double> weights;
  bool ssim3d_included = true;
  double total = 0.0;
};

// Dual-domain training objective evaluated on a solve trace. The SSIM3D terms
// are left out (and flagged) when the volume has fewer than 3 frames.
LossRecord vsharp_loss(const SolveTrace& trace, const MultiCoilKSpace& r, const RealVolume& x_star,
                       const MultiCoilKSpace& y_star, int n);

struct ReconReport {
  std::string method;
  std::string volume;
  double acceleration = 0.0;
  std::string scheme;
  double ssim = 0.0;    // mean of per-frame SSIM
  double ssim3d = 0.0;  // NaN when fewer than 3 frames
  double psnr = 0.0;    // over the whole volume
  double nmse = 0.0;    // over the whole volume
  double wall_seconds = 0.0;
};

// Metrics on magnitude images.
ReconReport evaluate_volume(const DynamicImage& pred, const RealVolume& ref,
                            double wall_seconds = 0.0);
ReconReport evaluate_volume(const DynamicImage& pred, const DynamicImage& ref,
                            double wall_seconds = 0.0);

}  // namespace cmr
