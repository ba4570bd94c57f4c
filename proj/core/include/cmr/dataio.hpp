#pragma once

// Container format (all integers little-endian, no padding):
//   magic    8 bytes  "CMRX0001"
//   kind     u8       0 k-space, 1 image, 2 maps, 3 mask
//   dtype    u8       0 complex (two f64, interleaved), 1 f64, 2 u8
//   ndim     u8
//   dims     ndim x u32 in (coil, frame, row, column) order, absent axes omitted
//   payload  row-major elements
//
// Accepted layouts per kind:
//   k-space  complex, 4 dims (coil, frame, row, column)
//   image    complex or f64, 2 dims (row, column) or 3 dims (frame, row, column)
//   maps     complex, 3 dims (coil, row, column)
//   mask     u8 with values 0/1, 3 dims (frame, row, column)

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "cmr/array.hpp"
#include "cmr/metrics.hpp"

namespace cmr {

enum class ArrayKind : std::uint8_t { kspace = 0, image = 1, maps = 2, mask = 3 };
enum class DType : std::uint8_t { complex128 = 0, float64 = 1, uint8 = 2 };

inline constexpr char kMagic[8] = {'C', 'M', 'R', 'X', '0', '0', '0', '1'};
inline constexpr std::size_t kPreambleSize = 11;

struct StoredArray {
  ArrayKind kind = ArrayKind::image;
  std::vector<std::uint32_t> dims;
  std::variant<std::vector<Complex>, std::vector<double>, std::vector<std::uint8_t>> data;

  DType dtype() const { return static_cast<DType>(data.index()); }
  std::size_t element_count() const;
};

// Serialization to / from memory.
std::vector<std::uint8_t> encode(const StoredArray& a);
StoredArray decode(const std::vector<std::uint8_t>& bytes);

void write_array(const std::filesystem::path& path, const StoredArray& a);
StoredArray read_array(const std::filesystem::path& path);

// Typed conversions; the `to_*` forms throw FormatError (offset 8, the kind
// byte) when the stored kind or layout does not match.
StoredArray from_kspace(const MultiCoilKSpace& y);
StoredArray from_image(const DynamicImage& x);
StoredArray from_real_image(const RealVolume& x);
StoredArray from_real_image(const RealGrid& x);
StoredArray from_maps(const SensitivityMaps& s);
StoredArray from_mask(const SamplingMask& m);

MultiCoilKSpace to_kspace(const StoredArray& a);
DynamicImage to_image(const StoredArray& a);  // real images are promoted to complex
SensitivityMaps to_maps(const StoredArray& a);
SamplingMask to_mask(const StoredArray& a);

void write_kspace(const std::filesystem::path& p, const MultiCoilKSpace& y);
void write_image(const std::filesystem::path& p, const DynamicImage& x);
void write_maps(const std::filesystem::path& p, const SensitivityMaps& s);
void write_mask(const std::filesystem::path& p, const SamplingMask& m);
MultiCoilKSpace read_kspace(const std::filesystem::path& p);
DynamicImage read_image(const std::filesystem::path& p);
SensitivityMaps read_maps(const std::filesystem::path& p);
SamplingMask read_mask(const std::filesystem::path& p);

// Report files. CSV header:
//   method,volume,acceleration,scheme,ssim,ssim3d,psnr,nmse,wall_seconds
// Rows are sorted by (method, volume); floats use fixed notation with six
// decimals, infinite PSNR is written "inf".
inline constexpr const char* kReportHeader =
    "method,volume,acceleration,scheme,ssim,ssim3d,psnr,nmse,wall_seconds";

std::string format_report_value(double v);
std::vector<ReconReport> sorted_reports(std::vector<ReconReport> reports);
std::string report_csv(const std::vector<ReconReport>& reports);
std::string report_json(const std::vector<ReconReport>& reports);

// Writes <path> (CSV) and <path with .json extension>.
void write_report(const std::filesystem::path& csv_path, const std::vector<ReconReport>& reports);

}  // namespace cmr
