#pragma once

#include "cmr/fourier.hpp"
#include "cmr/priors.hpp"

namespace cmr {

// Auxiliary refinement cascade. Each cascade takes a data-gradient step in
// k-space and adds a regularizer correction computed on the coil-combined
// image; the final k-space is made hard data-consistent.
struct ArnConfig {
  int cascades = 8;
  double eta = 1.0;
  DenoiserSpec regularizer{DenoiserKind::wavelet_soft_threshold, 0.01, 20, 3};

  void validate() const;
};

// k - eta * U (k - y) + expand(denoise(reduce(k)) - reduce(k)).
MultiCoilKSpace cascade_step(const MultiCoilKSpace& k, const MultiCoilKSpace& y,
                             const AcquisitionOperator& op, const ArnConfig& cfg);

// k0 = y, T cascades, then dc(k_T, y, mask).
MultiCoilKSpace refine(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                       const ArnConfig& cfg);

// sum_k conj(S_k) ifft2c(r_k). The mask is not applied: r carries content off
// the sampled set by construction.
DynamicImage init_z0(const MultiCoilKSpace& r, const AcquisitionOperator& op);

}  // namespace cmr
