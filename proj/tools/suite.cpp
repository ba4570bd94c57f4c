#include "suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <thread>

#include "cmr/calibration.hpp"
#include "cmr/fourier.hpp"

namespace cmr::suite {

std::string Case::name() const {
  return to_string(scheme) + "-R" + std::to_string(acceleration) + (kt_mode ? "-kt" : "");
}

Config preset(const std::string& name) {
  Config cfg;
  cfg.phantom.rows = 128;
  cfg.phantom.cols = 128;
  cfg.phantom.frames = 12;
  cfg.phantom.coils = 8;
  cfg.phantom.noise_sigma = 0.01;
  cfg.phantom.seed = 0;
  if (name == "desk-A") {
    for (int r : {4, 8, 10}) cfg.cases.push_back({Scheme::equispaced, r, false});
  } else if (name == "desk-B" || name == "smoke") {
    for (Scheme s : {Scheme::equispaced, Scheme::gaussian1d, Scheme::radial}) {
      for (int r : {4, 8}) cfg.cases.push_back({s, r, true});
    }
    if (name == "smoke") {
      cfg.phantom.rows = 64;
      cfg.phantom.cols = 64;
      cfg.phantom.frames = 4;
      cfg.phantom.coils = 4;
    }
  } else {
    throw InvalidParameterError("unknown bench preset '" + name + "'");
  }
  return cfg;
}

Truth make_truth(const PhantomSpec& spec) {
  Truth t;
  t.image = generate_phantom(spec);
  t.maps = coil_maps(spec);
  const MultiCoilKSpace full = simulate_full(t.image, t.maps, 0.0, 0);
  CoilImages coil_images = full;
  for (std::size_t k = 0; k < full.coils(); ++k) {
    for (std::size_t f = 0; f < full.frames(); ++f) {
      const std::size_t n = full.rows() * full.cols();
      ifft2c_inplace(coil_images.flat().subspan((k * full.frames() + f) * n, n), full.rows(),
                     full.cols());
    }
  }
  t.rss = rss_combine(coil_images);
  return t;
}

bool matches_on_mask(const MultiCoilKSpace& y_hat, const MultiCoilKSpace& y,
                     const SamplingMask& mask) {
  if (!y_hat.same_shape(y)) return false;
  const std::size_t n = y.rows() * y.cols();
  for (std::size_t k = 0; k < y.coils(); ++k) {
    for (std::size_t f = 0; f < y.frames(); ++f) {
      auto a = y_hat.plane(k, f);
      auto b = y.plane(k, f);
      auto m = mask.frame(f);
      for (std::size_t i = 0; i < n; ++i) {
        if (m[i] && std::memcmp(&a[i], &b[i], sizeof(Complex)) != 0) return false;
      }
    }
  }
  return true;
}

CaseResult run_case(const Config& cfg, const Truth& truth, const Case& c) {
  CaseResult res;
  res.spec = c;

  MaskSpec ms;
  ms.scheme = c.scheme;
  ms.acceleration = c.acceleration;
  ms.acs_fraction = cfg.acs_fraction;
  ms.kt_mode = c.kt_mode;
  ms.seed = cfg.mask_seed;
  ms.frames = cfg.phantom.frames;
  ms.rows = cfg.phantom.rows;
  ms.cols = cfg.phantom.cols;
  const SamplingMask mask = generate_mask(ms);
  res.measured_acceleration = measured_acceleration(mask);

  const MultiCoilKSpace y =
      simulate(truth.image, truth.maps, mask, cfg.phantom.noise_sigma, cfg.phantom.seed);
  const SensitivityMaps maps = estimate_sensitivities(y, acs_region(ms));
  const AcquisitionOperator op(maps, mask);

  auto check = [&](const MultiCoilKSpace& k) {
    ++res.dc_checks;
    if (!matches_on_mask(k, y, mask)) res.dc_exact = false;
  };
  const IterateObserver observer = [&](int, const DynamicImage&, const MultiCoilKSpace& k) {
    if (cfg.vsharp.per_iterate_dc) check(k);
  };

  for (const auto& method : cfg.methods) {
    const auto t0 = std::chrono::steady_clock::now();
    DynamicImage img;
    if (method == "zero-filled") {
      img = zero_filled(y, op);
    } else if (method == "sense") {
      img = cg_sense(y, op, cfg.cg);
    } else if (method == "vsharp") {
      img = reconstruct_final(y, op, cfg.vsharp, std::nullopt, observer);
    } else if (method == "vsharp-arn") {
      const MultiCoilKSpace r = refine(y, op, cfg.arn);
      check(r);
      img = reconstruct_final(y, op, cfg.vsharp, init_z0(r, op), observer);
    } else {
      throw InvalidParameterError("unknown method '" + method + "'");
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ReconReport rep = evaluate_volume(img, truth.rss, wall);
    rep.method = method;
    rep.volume = c.name();
    rep.acceleration = c.acceleration;
    rep.scheme = to_string(c.scheme);
    res.reports.push_back(rep);
    res.images.emplace(method, std::move(img));
  }
  return res;
}

std::vector<CaseResult> run(const Config& cfg, int jobs) {
  const Truth truth = make_truth(cfg.phantom);
  std::vector<CaseResult> results(cfg.cases.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cfg.cases.size(); ++i) results[i] = run_case(cfg, truth, cfg.cases[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cfg.cases.size());
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < cfg.cases.size(); i = next++) {
        try {
          results[i] = run_case(cfg, truth, cfg.cases[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

namespace {

std::vector<double> collect(const std::vector<CaseResult>& results, const std::string& method,
                            double ReconReport::*field) {
  std::vector<double> v;
  for (const auto& r : results) {
    for (const auto& rep : r.reports) {
      if (rep.method == method) v.push_back(rep.*field);
    }
  }
  return v;
}

}  // namespace

double mean_metric(const std::vector<CaseResult>& results, const std::string& method,
                   double ReconReport::*field) {
  const auto v = collect(results, method, field);
  if (v.empty()) throw InvalidParameterError("no reports for method '" + method + "'");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_metric(const std::vector<CaseResult>& results, const std::string& method,
                     double ReconReport::*field) {
  auto v = collect(results, method, field);
  if (v.empty()) throw InvalidParameterError("no reports for method '" + method + "'");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace cmr::suite
