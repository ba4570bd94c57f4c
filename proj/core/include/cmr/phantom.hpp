#pragma once

#include <cstdint>

#include "cmr/array.hpp"

namespace cmr {

struct PhantomSpec {
  std::size_t rows = 128;
  std::size_t cols = 128;
  std::size_t frames = 12;
  std::size_t coils = 8;
  double beat_amplitude = 0.15;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  // Cardiac period in frames; 0 means one beat spans `frames`.
  std::size_t period = 0;

  void validate() const;
};

// Geometry and intensity table of the synthetic scene. Positions and radii are
// fractions of the image size.
namespace phantom_constants {
inline constexpr double kTorsoIntensity = 0.2;
inline constexpr double kTorsoSemiAxis = 0.45;
inline constexpr double kLungIntensity = 0.05;
inline constexpr double kLeftLungCenter[2] = {0.48, 0.17};
inline constexpr double kLeftLungSemiAxes[2] = {0.28, 0.08};
inline constexpr double kRightLungCenter[2] = {0.48, 0.76};
inline constexpr double kRightLungSemiAxes[2] = {0.28, 0.10};
inline constexpr double kHeartCenter[2] = {0.5, 0.45};
inline constexpr double kHeartOuterRadius = 0.18;
inline constexpr double kHeartInnerRadius = 0.10;
inline constexpr double kWallIntensity = 0.9;
inline constexpr double kBloodIntensity = 0.5;
inline constexpr double kPhaseRamp = 0.3;  // times pi over (ny + nx)
inline constexpr double kCoilCircle = 0.55;  // radius = kCoilCircle * min(ny, nx) / 2
inline constexpr double kCoilSigma = 0.5;    // times min(ny, nx)
}  // namespace phantom_constants

// Inner myocardial radius at frame t, in pixels.
double inner_radius(const PhantomSpec& spec, double t);

// Real magnitude of the scene at (t, row, col) before the phase ramp.
double phantom_intensity(const PhantomSpec& spec, double t, double row, double col);

DynamicImage generate_phantom(const PhantomSpec& spec);

// Gaussian coil profiles normalized so that sum_k |S_k|^2 = 1 at every pixel.
SensitivityMaps coil_maps(const PhantomSpec& spec);

// y = mask * (fft2c(S_k x) + n). The complex noise uses
//   n = sqrt(-2 ln u1) (cos 2 pi u2 + i sin 2 pi u2) * std / sqrt(2),
//   std = noise_sigma * mean |noiseless k-space|,
// drawn for every entry in coil, frame, row, column order.
MultiCoilKSpace simulate(const DynamicImage& x, const SensitivityMaps& maps,
                         const SamplingMask& mask, double noise_sigma, std::uint64_t seed);

// Fully sampled k-space with noise (no mask).
MultiCoilKSpace simulate_full(const DynamicImage& x, const SensitivityMaps& maps,
                              double noise_sigma, std::uint64_t seed);

struct AugmentFlags {
  bool hflip = false;
  bool vflip = false;
  bool time_reverse = false;
};

// Image-domain flips (hflip mirrors columns, vflip mirrors rows) and frame
// reversal applied to every coil.
MultiCoilKSpace augment(const MultiCoilKSpace& y, const AugmentFlags& flags);

// Zeroes entries off the mask.
MultiCoilKSpace apply_mask(MultiCoilKSpace y, const SamplingMask& mask);

}  // namespace cmr
