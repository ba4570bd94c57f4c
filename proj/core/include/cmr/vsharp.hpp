#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cmr/array.hpp"
#include "cmr/fourier.hpp"
#include "cmr/priors.hpp"

namespace cmr {

enum class UInit { zero, scaled_adjoint };

std::string to_string(UInit u);
UInit parse_u_init(const std::string& name);

struct VSharpConfig {
  int iterations = 12;        // N
  int x_steps = 6;            // N_x
  double rho = 1.0;
  std::optional<double> step_size;  // empty: 1 / (1 + rho)
  DenoiserSpec denoiser{DenoiserKind::wavelet_soft_threshold, 0.01, 20, 3};
  bool per_iterate_dc = true;
  UInit u_init = UInit::zero;

  void validate() const;
  double resolved_step() const { return step_size ? *step_size : 1.0 / (1.0 + rho); }
};

struct Iterate {
  DynamicImage image;      // x_hat^(j)
  MultiCoilKSpace kspace;  // y_hat^(j)
};

struct SolveTrace {
  std::vector<Iterate> iterates;  // j = 1..N
  DynamicImage z0;
  std::vector<double> residual_history;

  const DynamicImage& final_image() const { return iterates.back().image; }
};

struct InitialState {
  DynamicImage z0;
  DynamicImage x0;
  DynamicImage u0;
};

// x0 = adjoint(y); z0 = override when given, else x0; u0 = 0 or 1e-3 * x0.
InitialState initialize(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                        const VSharpConfig& cfg,
                        const std::optional<DynamicImage>& z0_override = std::nullopt);

// N_x unrolled gradient steps on
//   1/2 ||A x - y||^2 + rho/2 ||x - z + u/rho||^2.
DynamicImage x_update(const DynamicImage& x, const DynamicImage& z_next, const DynamicImage& u,
                      const MultiCoilKSpace& y, const AcquisitionOperator& op,
                      const VSharpConfig& cfg);

// u + rho (x - z).
DynamicImage u_update(const DynamicImage& u, const DynamicImage& x_next,
                      const DynamicImage& z_next, double rho);

// Called once per outer iteration with j in [1, N].
using IterateObserver =
    std::function<void(int j, const DynamicImage& image, const MultiCoilKSpace& kspace)>;

// Full unrolled solve keeping every iterate.
SolveTrace reconstruct(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                       const VSharpConfig& cfg,
                       const std::optional<DynamicImage>& z0_override = std::nullopt);

// Same iteration, keeping only the final image; iterates are streamed to
// `observer` and residuals appended to `residuals` when given.
DynamicImage reconstruct_final(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                               const VSharpConfig& cfg,
                               const std::optional<DynamicImage>& z0_override = std::nullopt,
                               const IterateObserver& observer = {},
                               std::vector<double>* residuals = nullptr);

}  // namespace cmr
