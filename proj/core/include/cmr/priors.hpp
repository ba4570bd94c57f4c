#pragma once

#include <string>

#include "cmr/array.hpp"

namespace cmr {

enum class DenoiserKind { identity, soft_threshold, wavelet_soft_threshold, tv };

std::string to_string(DenoiserKind k);
DenoiserKind parse_denoiser_kind(const std::string& name);

struct DenoiserSpec {
  DenoiserKind kind = DenoiserKind::identity;
  double lambda = 0.0;
  int tv_iterations = 20;
  // Decomposition depth of the Haar transform used by the wavelet prior.
  int wavelet_levels = 1;

  void validate() const;
};

// Step of the dual projection iteration used by the TV prior.
inline constexpr double kTvStep = 0.249;

// z-update of the splitting scheme: the proximal map of G/rho evaluated at
// v = x + u_over_rho, i.e. argmin_z G(z) + rho/2 ||x - z + u/rho||^2. The
// previous auxiliary iterate `z` is part of the signature so learned
// denoisers can consume it; the proximal priors here ignore it.
DynamicImage denoise(const DynamicImage& x, const DynamicImage& z, const DynamicImage& u_over_rho,
                     double rho, const DenoiserSpec& spec);

// Single-frame proximal maps, threshold = lambda / rho.
void soft_threshold_inplace(std::span<Complex> v, double threshold);
ComplexGrid wavelet_prox(const ComplexGrid& v, double threshold, int levels);
ComplexGrid tv_prox(const ComplexGrid& v, double weight, int iterations);

// Isotropic total variation with forward differences (used by tests and
// diagnostics).
double total_variation(const ComplexGrid& v);

// Single-level orthonormal 2D Haar analysis / synthesis on even-sized grids.
// Quadrants: LL top-left, LH top-right, HL bottom-left, HH bottom-right, with
//   LL=(a+b+c+d)/2, LH=(a-b+c-d)/2, HL=(a+b-c-d)/2, HH=(a-b-c+d)/2
// for the block [[a, b], [c, d]].
ComplexGrid haar2d(const ComplexGrid& frame, bool inverse);

// Analysis of arbitrary-sized grids: edge-replicated up to a multiple of
// 2^levels, then `levels` recursive splits of the LL quadrant.
struct HaarCoefficients {
  ComplexGrid coeffs;
  std::size_t rows = 0;
  std::size_t cols = 0;
  int levels = 1;
};

HaarCoefficients haar2d_forward(const ComplexGrid& frame, int levels = 1);
ComplexGrid haar2d_inverse(const HaarCoefficients& coeffs);

}  // namespace cmr
