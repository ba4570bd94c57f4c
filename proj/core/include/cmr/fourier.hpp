#pragma once

#include <span>
#include <utility>

#include "cmr/array.hpp"

namespace cmr {

// Centered, orthonormal 2D DFT. Zero frequency sits at (ny/2, nx/2) (integer
// division) and both directions are scaled by 1/sqrt(ny*nx). Any size >= 2 is
// supported; powers of two use radix-2, other lengths go through Bluestein.
ComplexGrid fft2c(const ComplexGrid& frame);
ComplexGrid ifft2c(const ComplexGrid& frame);

// In-place variants on a row-major ny x nx plane. No finiteness check.
void fft2c_inplace(std::span<Complex> plane, std::size_t ny, std::size_t nx);
void ifft2c_inplace(std::span<Complex> plane, std::size_t ny, std::size_t nx);

// Unnormalized, uncentered 1D transform (sign -1 forward, +1 inverse).
void fft1d(std::span<Complex> data, bool inverse);

// T_{U,S}: image -> coil k-space, masked.
class AcquisitionOperator {
 public:
  AcquisitionOperator(SensitivityMaps maps, SamplingMask mask);

  const SensitivityMaps& maps() const { return maps_; }
  const SamplingMask& mask() const { return mask_; }
  std::size_t coils() const { return maps_.coils(); }
  std::size_t frames() const { return mask_.frames(); }
  std::size_t rows() const { return maps_.rows(); }
  std::size_t cols() const { return maps_.cols(); }

 private:
  SensitivityMaps maps_;
  SamplingMask mask_;
};

// mask_f * fft2c(S_k * x_f) for every coil k and frame f.
MultiCoilKSpace forward(const DynamicImage& x, const AcquisitionOperator& op);

// sum_k conj(S_k) * ifft2c(mask_f * y_{k,f}).
DynamicImage adjoint(const MultiCoilKSpace& y, const AcquisitionOperator& op);

// A^H A x, computed one coil-frame plane at a time.
DynamicImage gramian(const DynamicImage& x, const AcquisitionOperator& op);

// A^H (A x - y).
DynamicImage data_gradient(const DynamicImage& x, const MultiCoilKSpace& y,
                           const AcquisitionOperator& op);

// fft2c(S_k * x_f) without the mask.
MultiCoilKSpace expand(const DynamicImage& x, const SensitivityMaps& maps);

// sum_k conj(S_k) * ifft2c(k_{k,f}) without the mask.
DynamicImage coil_combine(const MultiCoilKSpace& k, const SensitivityMaps& maps);

// Hard data consistency: y where the mask is set, w elsewhere.
MultiCoilKSpace dc(const MultiCoilKSpace& w, const MultiCoilKSpace& y, const SamplingMask& mask);

struct ProjectedIterate {
  DynamicImage image;
  MultiCoilKSpace kspace;
};

// Replaces the sampled entries of the iterate's coil k-space with y and
// recombines: returns (x_hat, y_hat).
ProjectedIterate project_iterate(const DynamicImage& x, const MultiCoilKSpace& y,
                                 const AcquisitionOperator& op);

}  // namespace cmr
