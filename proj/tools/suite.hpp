#pragma once

// Seeded end-to-end comparison on the synthetic phantom: every case simulates
// an undersampled acquisition, calibrates maps from the ACS region and runs
// each requested reconstruction method.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cmr/arn.hpp"
#include "cmr/baselines.hpp"
#include "cmr/metrics.hpp"
#include "cmr/phantom.hpp"
#include "cmr/sampling.hpp"
#include "cmr/vsharp.hpp"

namespace cmr::suite {

inline const std::vector<std::string> kMethods = {"zero-filled", "sense", "vsharp", "vsharp-arn"};

struct Case {
  Scheme scheme = Scheme::equispaced;
  int acceleration = 4;
  bool kt_mode = false;

  std::string name() const;
};

struct Config {
  PhantomSpec phantom;
  std::vector<Case> cases;
  std::vector<std::string> methods = kMethods;
  double acs_fraction = 0.08;
  std::uint64_t mask_seed = 0;
  VSharpConfig vsharp;
  ArnConfig arn;
  CgSenseOptions cg;
};

// "desk-A": equispaced, one mask for all frames, R in {4, 8, 10}.
// "desk-B": kt-interleaved {equispaced, gaussian1d, radial} x R in {4, 8}.
// "smoke": a 64x64 four-frame version of desk-B for quick checks.
Config preset(const std::string& name);

struct CaseResult {
  Case spec;
  double measured_acceleration = 0.0;
  std::map<std::string, DynamicImage> images;
  std::vector<ReconReport> reports;
  // Every y_hat iterate and every ARN output matched y bitwise on the mask.
  bool dc_exact = true;
  std::size_t dc_checks = 0;
};

struct Truth {
  DynamicImage image;
  SensitivityMaps maps;
  RealVolume rss;  // magnitude reference
};

Truth make_truth(const PhantomSpec& spec);

CaseResult run_case(const Config& cfg, const Truth& truth, const Case& c);

// Runs every case; `jobs` > 1 runs cases on worker threads.
std::vector<CaseResult> run(const Config& cfg, int jobs = 1);

// Mean of `field` over all reports with the given method.
double mean_metric(const std::vector<CaseResult>& results, const std::string& method,
                   double ReconReport::*field);
double median_metric(const std::vector<CaseResult>& results, const std::string& method,
                     double ReconReport::*field);

// True when y_hat equals y bitwise wherever the mask is set.
bool matches_on_mask(const MultiCoilKSpace& y_hat, const MultiCoilKSpace& y,
                     const SamplingMask& mask);

}  // namespace cmr::suite
