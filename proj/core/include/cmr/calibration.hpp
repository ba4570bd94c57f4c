#pragma once

#include <functional>

#include "cmr/array.hpp"

namespace cmr {

// Maps -> maps hook applied after estimation. The default leaves maps untouched.
using MapRefiner = std::function<SensitivityMaps(SensitivityMaps)>;

inline SensitivityMaps identity_refiner(SensitivityMaps maps) { return maps; }

// Estimates coil sensitivities from the autocalibration region:
//   1. average y over frames,
//   2. keep only entries inside acs_mask (frame 0 of the region is used) and
//      apply a Hann taper across the region's columns (and rows when the
//      region does not span every row),
//   3. inverse transform each coil to a low-resolution image c_k,
//   4. S_k = c_k / (rss(c) + eps).
// Support is flagged where rss(c) > 1e-3 * max rss(c).
SensitivityMaps estimate_sensitivities(const MultiCoilKSpace& y, const SamplingMask& acs_mask,
                                       double eps = 1e-9,
                                       const MapRefiner& refiner = identity_refiner);

}  // namespace cmr
