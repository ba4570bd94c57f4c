#pragma once

#include <vector>

#include "cmr/fourier.hpp"

namespace cmr {

// Coil-combined inverse transform of the zero-filled k-space.
DynamicImage zero_filled(const MultiCoilKSpace& y, const AcquisitionOperator& op);

struct CgSenseOptions {
  double mu = 1e-2;
  int iterations = 15;
  double tol = 1e-6;
};

// Conjugate gradient on (A^H A + mu I) x = A^H y starting from x = 0. Stops
// after `iterations` or when ||r|| / ||A^H y|| <= tol. Residual norms (r_0
// first) are appended to `residuals` when given.
DynamicImage cg_sense(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                      const CgSenseOptions& opts = {}, std::vector<double>* residuals = nullptr);

}  // namespace cmr
