#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "cmr/arn.hpp"
#include "cmr/baselines.hpp"
#include "cmr/calibration.hpp"
#include "cmr/dataio.hpp"
#include "cmr/metrics.hpp"
#include "cmr/phantom.hpp"
#include "cmr/rng.hpp"
#include "cmr/sampling.hpp"
#include "cmr/vsharp.hpp"
#include "png.hpp"
#include "suite.hpp"

namespace cmr::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Every option of a subcommand is also a key of its --config file.
struct Binding {
  CLI::Option* opt = nullptr;
  std::function<void(const json&)> assign;
};
using Bindings = std::map<std::string, Binding>;

template <class T>
CLI::Option* bind_option(CLI::App& app, Bindings& b, const std::string& key, T& target,
                         const std::string& help) {
  CLI::Option* opt = app.add_option("--" + key, target, help)->capture_default_str();
  b[key] = {opt, [&target](const json& j) { target = j.get<T>(); }};
  return opt;
}

void apply_config(const std::string& path, const Bindings& b) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(e.byte, "config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidParameterError("config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = b.find(key);
    if (it == b.end()) throw InvalidParameterError("config: unknown key '" + key + "'");
    if (it->second.opt->count() > 0) continue;  // the flag wins
    try {
      it->second.assign(value);
    } catch (const json::exception&) {
      throw InvalidParameterError("config: bad value for '" + key + "'");
    }
  }
}

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) throw InvalidParameterError(std::string("missing required option ") + flag);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// phantom -----------------------------------------------------------------

struct PhantomArgs {
  PhantomSpec spec;
  std::string image, maps;
};

void add_phantom(CLI::App& app, PhantomArgs& a) {
  app.add_option("--ny", a.spec.rows, "rows")->capture_default_str();
  app.add_option("--nx", a.spec.cols, "columns")->capture_default_str();
  app.add_option("--nf", a.spec.frames, "frames")->capture_default_str();
  app.add_option("--nc", a.spec.coils, "coils")->capture_default_str();
  app.add_option("--beat", a.spec.beat_amplitude, "relative cardiac beat amplitude")
      ->capture_default_str();
  app.add_option("--period", a.spec.period, "beat period in frames (0: one beat per series)")
      ->capture_default_str();
  app.add_option("--image", a.image, "output image file")->required();
  app.add_option("--maps", a.maps, "output sensitivity map file")->required();
}

void run_phantom(const PhantomArgs& a, std::ostream& out) {
  a.spec.validate();
  write_image(a.image, generate_phantom(a.spec));
  write_maps(a.maps, coil_maps(a.spec));
  out << "phantom " << a.spec.frames << "x" << a.spec.rows << "x" << a.spec.cols << ", "
      << a.spec.coils << " coils\n";
}

// mask --------------------------------------------------------------------

struct MaskArgs {
  std::string scheme = "equispaced";
  int acceleration = 4;
  std::size_t nx = 128, ny = 0, nf = 1;
  double acs = 0.08;
  bool kt = false;
  std::uint64_t seed = 0;
  double angle0 = 0.0;
  std::string out;
};

void add_mask(CLI::App& app, MaskArgs& a) {
  app.add_option("--scheme", a.scheme, "equispaced | gaussian1d | radial")->capture_default_str();
  app.add_option("--R", a.acceleration, "acceleration factor")->capture_default_str();
  app.add_option("--nx", a.nx, "columns")->capture_default_str();
  app.add_option("--ny", a.ny, "rows (default: nx)");
  app.add_option("--nf", a.nf, "frames")->capture_default_str();
  app.add_option("--acs", a.acs, "fully sampled centre, fraction of nx")->capture_default_str();
  app.add_flag("--kt", a.kt, "interleave the pattern across frames");
  app.add_option("--seed", a.seed, "random seed")->capture_default_str();
  app.add_option("--angle0", a.angle0, "first radial spoke angle (radians)")->capture_default_str();
  app.add_option("--out", a.out, "output mask file");
}

void run_mask(const MaskArgs& a, std::ostream& out) {
  MaskSpec spec;
  spec.scheme = parse_scheme(a.scheme);
  spec.acceleration = a.acceleration;
  spec.acs_fraction = a.acs;
  spec.kt_mode = a.kt;
  spec.seed = a.seed;
  spec.frames = a.nf;
  spec.rows = a.ny ? a.ny : a.nx;
  spec.cols = a.nx;
  spec.radial_angle0 = a.angle0;
  const SamplingMask mask = generate_mask(spec);
  if (!a.out.empty()) write_mask(a.out, mask);
  out << "measured acceleration " << fixed(measured_acceleration(mask), 3) << "\n";
}

// undersample -------------------------------------------------------------

struct UndersampleArgs {
  std::string image, maps, mask, out;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string augment;
  double augment_prob = 0.5;
};

void add_undersample(CLI::App& app, UndersampleArgs& a) {
  app.add_option("--image", a.image, "ground-truth image file")->required();
  app.add_option("--maps", a.maps, "sensitivity map file")->required();
  app.add_option("--mask", a.mask, "mask file")->required();
  app.add_option("--noise", a.noise, "noise level relative to mean |k|")->capture_default_str();
  app.add_option("--seed", a.seed, "noise and augmentation seed")->capture_default_str();
  app.add_option("--augment", a.augment, "comma list of hflip, vflip, time-reverse");
  app.add_option("--augment-prob", a.augment_prob, "probability of each augmentation")
      ->capture_default_str();
  app.add_option("--out", a.out, "output k-space file")->required();
}

void run_undersample(const UndersampleArgs& a, std::ostream& out) {
  if (!(a.augment_prob >= 0.0 && a.augment_prob <= 1.0)) {
    throw InvalidParameterError("--augment-prob must lie in [0, 1]");
  }
  AugmentFlags flags;
  // Coin flips use their own stream so they never shift the noise draws.
  Rng coin(a.seed + 1);
  for (const auto& name : split_list(a.augment)) {
    const bool hit = coin.uniform() < a.augment_prob;
    if (name == "hflip") {
      flags.hflip = hit;
    } else if (name == "vflip") {
      flags.vflip = hit;
    } else if (name == "time-reverse" || name == "time_reverse") {
      flags.time_reverse = hit;
    } else {
      throw InvalidParameterError("unknown augmentation '" + name + "'");
    }
  }
  const DynamicImage x = read_image(a.image);
  const SensitivityMaps maps = read_maps(a.maps);
  const SamplingMask mask = read_mask(a.mask);
  MultiCoilKSpace full = simulate_full(x, maps, a.noise, a.seed);
  if (flags.hflip || flags.vflip || flags.time_reverse) full = augment(full, flags);
  write_kspace(a.out, apply_mask(std::move(full), mask));
  out << "undersampled " << shape_string(x) << " at R=" << fixed(measured_acceleration(mask), 3);
  if (flags.hflip) out << " hflip";
  if (flags.vflip) out << " vflip";
  if (flags.time_reverse) out << " time-reverse";
  out << "\n";
}

// recon -------------------------------------------------------------------

struct ReconArgs {
  std::string method = "vsharp";
  std::string kspace, mask, maps, acs_mask, out, trace_out, config;
  std::size_t acs_width = 0;

  int iterations = VSharpConfig{}.iterations;
  int x_steps = VSharpConfig{}.x_steps;
  double rho = VSharpConfig{}.rho;
  double step_size = 0.0;
  std::string denoiser = to_string(VSharpConfig{}.denoiser.kind);
  double lambda = VSharpConfig{}.denoiser.lambda;
  int tv_iterations = VSharpConfig{}.denoiser.tv_iterations;
  int wavelet_levels = VSharpConfig{}.denoiser.wavelet_levels;
  bool per_iterate_dc = VSharpConfig{}.per_iterate_dc;
  std::string u_init = to_string(VSharpConfig{}.u_init);

  int arn_cascades = ArnConfig{}.cascades;
  double arn_eta = ArnConfig{}.eta;
  std::string arn_regularizer = to_string(ArnConfig{}.regularizer.kind);
  double arn_lambda = ArnConfig{}.regularizer.lambda;
  int arn_tv_iterations = ArnConfig{}.regularizer.tv_iterations;
  int arn_wavelet_levels = ArnConfig{}.regularizer.wavelet_levels;

  double cg_mu = CgSenseOptions{}.mu;
  int cg_iterations = CgSenseOptions{}.iterations;
  double cg_tol = CgSenseOptions{}.tol;

  Bindings bindings;
};

void add_recon(CLI::App& app, ReconArgs& a) {
  auto& b = a.bindings;
  bind_option(app, b, "method", a.method, "zero-filled | sense | vsharp | vsharp-arn");
  bind_option(app, b, "kspace", a.kspace, "undersampled k-space file");
  bind_option(app, b, "mask", a.mask, "mask file");
  bind_option(app, b, "maps", a.maps, "sensitivity maps (default: estimate from the ACS region)");
  bind_option(app, b, "acs-mask", a.acs_mask, "calibration region mask file");
  bind_option(app, b, "acs-width", a.acs_width, "calibration width (0: infer from the mask)");
  bind_option(app, b, "out", a.out, "output image file");
  bind_option(app, b, "trace-out", a.trace_out, "directory for z0, iterates and residuals");
  bind_option(app, b, "iterations", a.iterations, "vSHARP iterations N");
  bind_option(app, b, "x-steps", a.x_steps, "gradient steps per x-update");
  bind_option(app, b, "rho", a.rho, "penalty rho");
  bind_option(app, b, "step-size", a.step_size, "x-update step (0: 1/(1+rho))");
  bind_option(app, b, "denoiser", a.denoiser, "identity | soft_threshold | wavelet | tv");
  bind_option(app, b, "lambda", a.lambda, "prior weight");
  bind_option(app, b, "tv-iterations", a.tv_iterations, "TV prox iterations");
  bind_option(app, b, "wavelet-levels", a.wavelet_levels, "Haar decomposition depth");
  bind_option(app, b, "per-iterate-dc", a.per_iterate_dc, "hard data consistency after each iterate");
  bind_option(app, b, "u-init", a.u_init, "zero | scaled_adjoint");
  bind_option(app, b, "arn-cascades", a.arn_cascades, "ARN cascades T");
  bind_option(app, b, "arn-eta", a.arn_eta, "ARN data step");
  bind_option(app, b, "arn-regularizer", a.arn_regularizer, "ARN regularizer kind");
  bind_option(app, b, "arn-lambda", a.arn_lambda, "ARN regularizer weight");
  bind_option(app, b, "arn-tv-iterations", a.arn_tv_iterations, "ARN TV prox iterations");
  bind_option(app, b, "arn-wavelet-levels", a.arn_wavelet_levels, "ARN Haar depth");
  bind_option(app, b, "cg-mu", a.cg_mu, "CG-SENSE Tikhonov weight");
  bind_option(app, b, "cg-iterations", a.cg_iterations, "CG-SENSE iterations");
  bind_option(app, b, "cg-tol", a.cg_tol, "CG-SENSE relative residual tolerance");
  app.add_option("--config", a.config, "JSON file, one key per flag; flags take precedence");
}

VSharpConfig vsharp_config(const ReconArgs& a) {
  VSharpConfig c;
  c.iterations = a.iterations;
  c.x_steps = a.x_steps;
  c.rho = a.rho;
  if (a.step_size != 0.0) c.step_size = a.step_size;
  c.denoiser = {parse_denoiser_kind(a.denoiser), a.lambda, a.tv_iterations, a.wavelet_levels};
  c.per_iterate_dc = a.per_iterate_dc;
  c.u_init = parse_u_init(a.u_init);
  c.validate();
  return c;
}

ArnConfig arn_config(const ReconArgs& a) {
  ArnConfig c;
  c.cascades = a.arn_cascades;
  c.eta = a.arn_eta;
  c.regularizer = {parse_denoiser_kind(a.arn_regularizer), a.arn_lambda, a.arn_tv_iterations,
                   a.arn_wavelet_levels};
  c.validate();
  return c;
}

SensitivityMaps recon_maps(const ReconArgs& a, const MultiCoilKSpace& y, const SamplingMask& mask) {
  if (!a.maps.empty()) return read_maps(a.maps);
  if (!a.acs_mask.empty()) return estimate_sensitivities(y, read_mask(a.acs_mask));
  const std::size_t width = a.acs_width ? a.acs_width : infer_acs_width(mask);
  if (width == 0) throw CalibrationError("no fully sampled centre to calibrate from; pass --maps");
  return estimate_sensitivities(y, acs_region_for(mask, width));
}

void run_recon(ReconArgs& a, std::ostream& out) {
  if (!a.config.empty()) apply_config(a.config, a.bindings);
  require_path(a.kspace, "--kspace");
  require_path(a.mask, "--mask");
  require_path(a.out, "--out");
  const bool uses_vsharp = a.method == "vsharp" || a.method == "vsharp-arn";
  if (!uses_vsharp && a.method != "zero-filled" && a.method != "sense") {
    throw InvalidParameterError("unknown method '" + a.method + "'");
  }
  if (!a.trace_out.empty() && !uses_vsharp) {
    throw InvalidParameterError("--trace-out needs a vsharp method");
  }
  const VSharpConfig vcfg = vsharp_config(a);
  const ArnConfig acfg = arn_config(a);
  const CgSenseOptions cg{a.cg_mu, a.cg_iterations, a.cg_tol};

  const MultiCoilKSpace y = read_kspace(a.kspace);
  const SamplingMask mask = read_mask(a.mask);
  const AcquisitionOperator op(recon_maps(a, y, mask), mask);

  const auto t0 = std::chrono::steady_clock::now();
  DynamicImage x;
  if (a.method == "zero-filled") {
    x = zero_filled(y, op);
  } else if (a.method == "sense") {
    x = cg_sense(y, op, cg);
  } else {
    std::optional<DynamicImage> z0;
    if (a.method == "vsharp-arn") z0 = init_z0(refine(y, op, acfg), op);
    if (a.trace_out.empty()) {
      x = reconstruct_final(y, op, vcfg, z0);
    } else {
      const fs::path dir = a.trace_out;
      fs::create_directories(dir);
      write_image(dir / "z0.cmrx", z0 ? *z0 : adjoint(y, op));
      std::vector<double> residuals;
      x = reconstruct_final(
          y, op, vcfg, z0,
          [&](int j, const DynamicImage& image, const MultiCoilKSpace&) {
            char name[32];
            std::snprintf(name, sizeof name, "iterate_%02d.cmrx", j);
            write_image(dir / name, image);
          },
          &residuals);
      std::ofstream(dir / "residuals.json") << json(residuals).dump(2) << "\n";
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_image(a.out, x);
  out << a.method << " " << shape_string(x) << " in " << fixed(wall, 3) << " s\n";
}

// eval --------------------------------------------------------------------

struct EvalArgs {
  std::string pred, ref, out;
  std::string method = "unknown", volume = "volume", scheme = "";
  double acceleration = 0.0;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  app.add_option("--pred", a.pred, "reconstructed image file")->required();
  app.add_option("--ref", a.ref, "reference image file")->required();
  app.add_option("--out", a.out, "report CSV path (a .json sibling is written too)");
  app.add_option("--method", a.method, "method label")->capture_default_str();
  app.add_option("--volume", a.volume, "volume label")->capture_default_str();
  app.add_option("--scheme", a.scheme, "scheme label");
  app.add_option("--acceleration", a.acceleration, "acceleration label");
}

void run_eval(const EvalArgs& a, std::ostream& out) {
  ReconReport rep = evaluate_volume(read_image(a.pred), read_image(a.ref));
  rep.method = a.method;
  rep.volume = a.volume;
  rep.scheme = a.scheme;
  rep.acceleration = a.acceleration;
  if (!a.out.empty()) write_report(a.out, {rep});
  out << report_csv({rep});
}

// bench -------------------------------------------------------------------

struct BenchArgs {
  std::string preset = "desk-A";
  std::string out;
  std::string methods;
  int jobs = 1;
  bool no_png = false;
};

void add_bench(CLI::App& app, BenchArgs& a) {
  app.add_option("--preset", a.preset, "desk-A | desk-B | smoke")->capture_default_str();
  app.add_option("--out", a.out, "output directory")->required();
  app.add_option("--methods", a.methods, "comma list (default: all four)");
  app.add_option("--jobs", a.jobs, "cases run in parallel")->capture_default_str();
  app.add_flag("--no-png", a.no_png, "skip the magnitude dumps");
}

void run_bench(const BenchArgs& a, std::ostream& out) {
  suite::Config cfg = suite::preset(a.preset);
  if (!a.methods.empty()) cfg.methods = split_list(a.methods);
  for (const auto& m : cfg.methods) {
    if (std::find(suite::kMethods.begin(), suite::kMethods.end(), m) == suite::kMethods.end()) {
      throw InvalidParameterError("unknown method '" + m + "'");
    }
  }
  if (a.jobs < 1) throw InvalidParameterError("--jobs must be >= 1");

  const fs::path dir = a.out;
  fs::create_directories(dir);
  const auto results = suite::run(cfg, a.jobs);

  std::vector<ReconReport> reports;
  bool dc_exact = true;
  for (const auto& r : results) {
    dc_exact = dc_exact && r.dc_exact;
    reports.insert(reports.end(), r.reports.begin(), r.reports.end());
    if (a.no_png) continue;
    const fs::path case_dir = dir / r.spec.name();
    fs::create_directories(case_dir);
    for (const auto& [method, image] : r.images) {
      png::write_magnitude_strip(case_dir / (method + ".png"), image);
    }
  }
  write_report(dir / "report.csv", reports);

  out << "preset " << a.preset << ", " << results.size() << " cases\n";
  for (const auto& m : cfg.methods) {
    out << "  " << m << ": mean ssim " << fixed(suite::mean_metric(results, m, &ReconReport::ssim), 4)
        << ", median nmse " << fixed(suite::median_metric(results, m, &ReconReport::nmse), 5)
        << "\n";
  }
  out << "data consistency " << (dc_exact ? "exact" : "VIOLATED") << "\n";
  if (!dc_exact) throw NumericError("data consistency violated");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const IoError*>(&e)) return kFormat;
  if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const UndefinedMetricError*>(&e) ||
      dynamic_cast<const CalibrationError*>(&e)) {
    return kNumeric;
  }
  if (dynamic_cast<const InvalidParameterError*>(&e) || dynamic_cast<const InvalidSpecError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e) || dynamic_cast<const DegenerateMaskError*>(&e)) {
    return kUsage;
  }
  return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic MRI reconstruction: phantoms, masks, reconstructions and metrics", "cmr"};
  app.require_subcommand(1);

  PhantomArgs phantom_args;
  MaskArgs mask_args;
  UndersampleArgs undersample_args;
  ReconArgs recon_args;
  EvalArgs eval_args;
  BenchArgs bench_args;

  auto* phantom = app.add_subcommand("phantom", "write a ground-truth image and coil maps");
  add_phantom(*phantom, phantom_args);
  auto* mask = app.add_subcommand("mask", "write a sampling mask and print its acceleration");
  add_mask(*mask, mask_args);
  auto* undersample = app.add_subcommand("undersample", "simulate an undersampled acquisition");
  add_undersample(*undersample, undersample_args);
  auto* recon = app.add_subcommand("recon", "reconstruct an image from k-space");
  add_recon(*recon, recon_args);
  auto* eval = app.add_subcommand("eval", "score a reconstruction against a reference");
  add_eval(*eval, eval_args);
  auto* bench = app.add_subcommand("bench", "run the seeded comparison suite");
  add_bench(*bench, bench_args);

  std::vector<const char*> argv{"cmr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*phantom) run_phantom(phantom_args, out);
    if (*mask) run_mask(mask_args, out);
    if (*undersample) run_undersample(undersample_args, out);
    if (*recon) run_recon(recon_args, out);
    if (*eval) run_eval(eval_args, out);
    if (*bench) run_bench(bench_args, out);
  } catch (const std::exception& e) {
    err << "cmr: error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cmr::cli
