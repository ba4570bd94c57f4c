#include "cmr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "cmr/rng.hpp"

namespace cmr {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::equispaced:
      return "equispaced";
    case Scheme::gaussian1d:
      return "gaussian1d";
    case Scheme::radial:
      return "radial";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "equispaced") return Scheme::equispaced;
  if (name == "gaussian1d" || name == "gaussian") return Scheme::gaussian1d;
  if (name == "radial") return Scheme::radial;
  throw InvalidSpecError("unknown sampling scheme '" + name + "'");
}

void MaskSpec::validate() const {
  if (acceleration < 1) throw InvalidSpecError("acceleration must be >= 1");
  if (!(acs_fraction >= 0.0 && acs_fraction < 1.0)) {
    throw InvalidSpecError("acs_fraction must lie in [0, 1)");
  }
  if (frames < 1 || rows < 2 || cols < 2) throw InvalidSpecError("mask shape too small");
}

std::size_t acs_count(const MaskSpec& spec) {
  return static_cast<std::size_t>(std::lround(spec.acs_fraction * static_cast<double>(spec.cols)));
}

std::pair<int, int> acs_block(std::size_t n, std::size_t width) {
  const int c = static_cast<int>(n / 2);
  const int w = static_cast<int>(width);
  return {c - (w + 1) / 2, c + w / 2};
}

int equispaced_offset(std::uint64_t seed, int acceleration) {
  Rng rng(seed);
  return static_cast<int>(std::floor(rng.uniform() * acceleration));
}

std::vector<int> equispaced_columns(std::size_t nx, int acceleration, int offset,
                                    std::size_t acs_width) {
  std::set<int> cols;
  for (int c = offset; c < static_cast<int>(nx); c += acceleration) cols.insert(c);
  const auto [b, e] = acs_block(nx, acs_width);
  for (int c = std::max(b, 0); c < std::min(e, static_cast<int>(nx)); ++c) cols.insert(c);
  return {cols.begin(), cols.end()};
}

std::vector<int> gaussian1d_columns(std::size_t nx, std::size_t count, std::size_t acs_width,
                                    std::uint64_t seed) {
  std::vector<std::uint8_t> taken(nx, 0);
  const auto [b, e] = acs_block(nx, acs_width);
  std::size_t held = 0;
  for (int c = std::max(b, 0); c < std::min(e, static_cast<int>(nx)); ++c) {
    taken[static_cast<std::size_t>(c)] = 1;
    ++held;
  }
  const double sigma = static_cast<double>(nx) / 6.0;
  const double c0 = static_cast<double>(nx / 2);
  std::vector<double> weight(nx);
  for (std::size_t c = 0; c < nx; ++c) {
    const double d = static_cast<double>(c) - c0;
    weight[c] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  Rng rng(seed);
  while (held < count) {
    double total = 0.0;
    for (std::size_t c = 0; c < nx; ++c) {
      if (!taken[c]) total += weight[c];
    }
    const double u = rng.uniform() * total;
    double cum = 0.0;
    std::size_t pick = nx;
    std::size_t last = nx;
    for (std::size_t c = 0; c < nx; ++c) {
      if (taken[c]) continue;
      last = c;
      cum += weight[c];
      if (cum > u) {
        pick = c;
        break;
      }
    }
    if (pick == nx) pick = last;  // u landed on the rounding tail
    taken[pick] = 1;
    ++held;
  }
  std::vector<int> out;
  for (std::size_t c = 0; c < nx; ++c) {
    if (taken[c]) out.push_back(static_cast<int>(c));
  }
  return out;
}

std::vector<double> radial_angles(const MaskSpec& spec, std::size_t frame) {
  const long nspokes =
      std::max(1L, std::lround(static_cast<double>(spec.cols) / spec.acceleration));
  double theta0 = spec.radial_angle0;
  if (spec.kt_mode) theta0 += static_cast<double>(frame) * kGoldenAngle;
  std::vector<double> out(static_cast<std::size_t>(nspokes));
  for (long s = 0; s < nspokes; ++s) {
    out[static_cast<std::size_t>(s)] =
        theta0 + static_cast<double>(s) * std::numbers::pi / static_cast<double>(nspokes);
  }
  return out;
}

void rasterize_spokes(std::span<std::uint8_t> frame, std::size_t ny, std::size_t nx,
                      const std::vector<double>& angles) {
  const double cy = static_cast<double>(ny / 2);
  const double cx = static_cast<double>(nx / 2);
  const double half = 0.5 * std::sqrt(static_cast<double>(ny * ny + nx * nx));
  const long steps = static_cast<long>(std::floor(2.0 * half / 0.5));
  for (double theta : angles) {
    const double dr = std::sin(theta);
    const double dc = std::cos(theta);
    for (long i = 0; i <= steps; ++i) {
      const double t = -half + 0.5 * static_cast<double>(i);
      const long r = std::lround(cy + t * dr);
      const long c = std::lround(cx + t * dc);
      if (r < 0 || c < 0 || r >= static_cast<long>(ny) || c >= static_cast<long>(nx)) continue;
      frame[static_cast<std::size_t>(r) * nx + static_cast<std::size_t>(c)] = 1;
    }
  }
  frame[(ny / 2) * nx + nx / 2] = 1;
}

SamplingMask equispaced_mask(const MaskSpec& spec) {
  spec.validate();
  if (static_cast<std::size_t>(spec.acceleration) > spec.cols) {
    throw InvalidSpecError("equispaced: R=" + std::to_string(spec.acceleration) +
                           " exceeds nx=" + std::to_string(spec.cols));
  }
  const int base = equispaced_offset(spec.seed, spec.acceleration);
  const std::size_t acs = acs_count(spec);
  std::vector<std::vector<int>> columns(spec.frames);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    const int offset =
        spec.kt_mode ? static_cast<int>((static_cast<std::size_t>(base) + f) %
                                        static_cast<std::size_t>(spec.acceleration))
                     : base;
    columns[f] = equispaced_columns(spec.cols, spec.acceleration, offset, acs);
  }
  return SamplingMask::from_columns(spec.rows, spec.cols, columns);
}

SamplingMask gaussian1d_mask(const MaskSpec& spec) {
  spec.validate();
  const std::size_t acs = acs_count(spec);
  const auto nominal = static_cast<std::size_t>(
      std::lround(static_cast<double>(spec.cols) / spec.acceleration));
  if (nominal < acs) {
    throw InvalidSpecError("gaussian1d: round(nx/R)=" + std::to_string(nominal) +
                           " is smaller than the ACS width " + std::to_string(acs));
  }
  const std::size_t count = std::max(nominal, acs);
  std::vector<std::vector<int>> columns(spec.frames);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    const std::uint64_t seed = spec.kt_mode ? (spec.seed ^ static_cast<std::uint64_t>(f)) : spec.seed;
    if (f > 0 && !spec.kt_mode) {
      columns[f] = columns[0];
    } else {
      columns[f] = gaussian1d_columns(spec.cols, count, acs, seed);
    }
  }
  return SamplingMask::from_columns(spec.rows, spec.cols, columns);
}

SamplingMask radial_mask(const MaskSpec& spec) {
  spec.validate();
  if (spec.rows < 4 || spec.cols < 4) throw InvalidSpecError("radial: ny and nx must be >= 4");
  SamplingMask mask(spec.frames, spec.rows, spec.cols);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    rasterize_spokes(mask.frame(f), spec.rows, spec.cols, radial_angles(spec, f));
  }
  return mask;
}

SamplingMask kt_expand(const MaskSpec& spec) {
  if (!spec.kt_mode) throw InvalidSpecError("kt_expand requires kt_mode");
  return generate_mask(spec);
}

SamplingMask generate_mask(const MaskSpec& spec) {
  switch (spec.scheme) {
    case Scheme::equispaced:
      return equispaced_mask(spec);
    case Scheme::gaussian1d:
      return gaussian1d_mask(spec);
    case Scheme::radial:
      return radial_mask(spec);
  }
  throw InvalidSpecError("invalid scheme");
}

double measured_acceleration(const SamplingMask& mask) {
  const std::size_t sampled = mask.sampled_count();
  if (sampled == 0) throw DegenerateMaskError("mask has no sampled entries");
  return static_cast<double>(mask.size()) / static_cast<double>(sampled);
}

namespace {

SamplingMask block_region(std::size_t nf, std::size_t ny, std::size_t nx, std::size_t width,
                          bool box) {
  SamplingMask region(nf, ny, nx);
  const auto [c0, c1] = acs_block(nx, width);
  int r0 = 0, r1 = static_cast<int>(ny);
  if (box) std::tie(r0, r1) = acs_block(ny, width);
  for (std::size_t f = 0; f < nf; ++f) {
    for (int r = std::max(r0, 0); r < std::min(r1, static_cast<int>(ny)); ++r) {
      for (int c = std::max(c0, 0); c < std::min(c1, static_cast<int>(nx)); ++c) {
        region(f, static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = 1;
      }
    }
  }
  return region;
}

}  // namespace

SamplingMask acs_region(const MaskSpec& spec) {
  spec.validate();
  return block_region(spec.frames, spec.rows, spec.cols, acs_count(spec),
                      spec.scheme == Scheme::radial);
}

bool has_cartesian_structure(const SamplingMask& mask) {
  for (std::size_t f = 0; f < mask.frames(); ++f) {
    for (std::size_t c = 0; c < mask.cols(); ++c) {
      const auto first = mask(f, 0, c);
      for (std::size_t r = 1; r < mask.rows(); ++r) {
        if (mask(f, r, c) != first) return false;
      }
    }
  }
  return true;
}

SamplingMask acs_region_for(const SamplingMask& mask, std::size_t width) {
  return block_region(mask.frames(), mask.rows(), mask.cols(), width,
                      !has_cartesian_structure(mask));
}

std::size_t infer_acs_width(const SamplingMask& mask) {
  const bool box = !has_cartesian_structure(mask);
  const std::size_t limit = box ? std::min(mask.rows(), mask.cols()) : mask.cols();
  std::size_t best = 0;
  for (std::size_t w = 1; w <= limit; ++w) {
    const SamplingMask region = block_region(mask.frames(), mask.rows(), mask.cols(), w, box);
    bool covered = true;
    for (std::size_t i = 0; i < region.size() && covered; ++i) {
      if (region.flat()[i] && !mask.flat()[i]) covered = false;
    }
    if (!covered) break;
    best = w;
  }
  return best;
}

}  // namespace cmr
