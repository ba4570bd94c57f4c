#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cmr/array.hpp"

namespace cmr {

enum class Scheme { equispaced, gaussian1d, radial };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct MaskSpec {
  Scheme scheme = Scheme::equispaced;
  int acceleration = 4;
  double acs_fraction = 0.0;
  bool kt_mode = false;
  std::uint64_t seed = 0;
  std::size_t frames = 1;
  std::size_t rows = 2;
  std::size_t cols = 2;
  // Angle of the first radial spoke in frame 0 (radians).
  double radial_angle0 = 0.0;

  void validate() const;
};

// Golden-angle increment between kt radial frames, in radians.
inline constexpr double kGoldenAngle = 111.246117975 * 3.14159265358979323846 / 180.0;

// round(acs_fraction * cols).
std::size_t acs_count(const MaskSpec& spec);

// Centred block [nx/2 - ceil(w/2), nx/2 + floor(w/2)).
std::pair<int, int> acs_block(std::size_t n, std::size_t width);

// Offset drawn from the first uniform of Rng(seed): floor(u * R).
int equispaced_offset(std::uint64_t seed, int acceleration);

// {offset, offset+R, ...} united with the ACS block, sorted.
std::vector<int> equispaced_columns(std::size_t nx, int acceleration, int offset,
                                    std::size_t acs_width);

// ACS block plus Gaussian-weighted draws without replacement until `count`
// distinct columns are held. Sorted.
std::vector<int> gaussian1d_columns(std::size_t nx, std::size_t count, std::size_t acs_width,
                                    std::uint64_t seed);

// Spoke angles used for one frame.
std::vector<double> radial_angles(const MaskSpec& spec, std::size_t frame);

// Marks the rasterized spokes of a single frame.
void rasterize_spokes(std::span<std::uint8_t> frame, std::size_t ny, std::size_t nx,
                      const std::vector<double>& angles);

// Generators. Each honors spec.kt_mode.
SamplingMask equispaced_mask(const MaskSpec& spec);
SamplingMask gaussian1d_mask(const MaskSpec& spec);
SamplingMask radial_mask(const MaskSpec& spec);

// Frame-interleaved variant of spec.scheme; requires kt_mode.
SamplingMask kt_expand(const MaskSpec& spec);

// Dispatches on spec.scheme.
SamplingMask generate_mask(const MaskSpec& spec);

// Total entries / sampled entries.
double measured_acceleration(const SamplingMask& mask);

// Calibration region for a spec: the ACS column block over all rows for the
// Cartesian schemes, a centred acs x acs box for radial.
SamplingMask acs_region(const MaskSpec& spec);

// Same construction for an existing mask: a column block when the mask has
// Cartesian structure, a centred box otherwise.
SamplingMask acs_region_for(const SamplingMask& mask, std::size_t width);

// Largest centred width whose calibration region is sampled in every frame.
std::size_t infer_acs_width(const SamplingMask& mask);

// True when every column is either fully sampled or empty in each frame.
bool has_cartesian_structure(const SamplingMask& mask);

}  // namespace cmr
