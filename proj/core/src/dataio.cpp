#include "cmr/dataio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

namespace cmr {

namespace {

std::size_t element_size(DType t) {
  switch (t) {
    case DType::complex128:
      return 16;
    case DType::float64:
      return 8;
    case DType::uint8:
      return 1;
  }
  return 0;
}

bool layout_allowed(ArrayKind kind, DType dtype, std::size_t ndim) {
  switch (kind) {
    case ArrayKind::kspace:
      return dtype == DType::complex128 && ndim == 4;
    case ArrayKind::image:
      return (dtype == DType::complex128 || dtype == DType::float64) && (ndim == 2 || ndim == 3);
    case ArrayKind::maps:
      return dtype == DType::complex128 && ndim == 3;
    case ArrayKind::mask:
      return dtype == DType::uint8 && ndim == 3;
  }
  return false;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

[[noreturn]] void kind_mismatch(const StoredArray& a, const char* expected) {
  throw FormatError(8, std::string("expected ") + expected + " array, found kind " +
                           std::to_string(static_cast<int>(a.kind)) + " with " +
                           std::to_string(a.dims.size()) + " dims");
}

template <class T>
const std::vector<T>& payload(const StoredArray& a, const char* expected) {
  if (!std::holds_alternative<std::vector<T>>(a.data)) kind_mismatch(a, expected);
  return std::get<std::vector<T>>(a.data);
}

std::vector<std::uint32_t> dims_of(std::initializer_list<std::size_t> sizes) {
  std::vector<std::uint32_t> d;
  for (auto s : sizes) d.push_back(static_cast<std::uint32_t>(s));
  return d;
}

}  // namespace

std::size_t StoredArray::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode(const StoredArray& a) {
  if (!layout_allowed(a.kind, a.dtype(), a.dims.size())) {
    throw FormatError(8, "refusing to encode an invalid kind/dtype/ndim combination");
  }
  const std::size_t n = a.element_count();
  std::vector<std::uint8_t> out;
  out.reserve(kPreambleSize + 4 * a.dims.size() + n * element_size(a.dtype()));
  for (char c : kMagic) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(static_cast<std::uint8_t>(a.kind));
  out.push_back(static_cast<std::uint8_t>(a.dtype()));
  out.push_back(static_cast<std::uint8_t>(a.dims.size()));
  for (auto d : a.dims) put_u32(out, d);
  std::visit(
      [&](const auto& v) {
        if (v.size() != n) throw DimensionError("encode: payload length does not match dims");
        using T = typename std::decay_t<decltype(v)>::value_type;
        for (const auto& e : v) {
          if constexpr (std::is_same_v<T, Complex>) {
            put_f64(out, e.real());
            put_f64(out, e.imag());
          } else if constexpr (std::is_same_v<T, double>) {
            put_f64(out, e);
          } else {
            out.push_back(e);
          }
        }
      },
      a.data);
  return out;
}

StoredArray decode(const std::vector<std::uint8_t>& bytes) {
  const std::size_t size = bytes.size();
  if (size < sizeof(kMagic) || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError(0, "bad magic (expected CMRX0001)");
  }
  if (size < kPreambleSize) throw FormatError(size, "truncated header");
  const std::uint8_t kind = bytes[8];
  const std::uint8_t dtype = bytes[9];
  const std::uint8_t ndim = bytes[10];
  if (kind > 3) throw FormatError(8, "unknown kind code " + std::to_string(kind));
  if (dtype > 2) throw FormatError(9, "unknown dtype code " + std::to_string(dtype));
  StoredArray a;
  a.kind = static_cast<ArrayKind>(kind);
  const auto dt = static_cast<DType>(dtype);
  if (!layout_allowed(a.kind, dt, ndim)) {
    throw FormatError(9, "kind " + std::to_string(kind) + " does not accept dtype " +
                             std::to_string(dtype) + " with " + std::to_string(ndim) + " dims");
  }
  const std::size_t header = kPreambleSize + 4 * std::size_t{ndim};
  if (size < header) throw FormatError(size, "truncated dimension table");

  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    const std::size_t off = kPreambleSize + 4 * i;
    const std::uint32_t d = get_u32(&bytes[off]);
    if (d == 0) throw FormatError(off, "zero-length axis");
    if (count > (std::uint64_t{1} << 40) / d) throw FormatError(off, "array too large");
    count *= d;
    a.dims.push_back(d);
  }
  const std::uint64_t expected = header + count * element_size(dt);
  if (size < expected) {
    throw FormatError(size, "truncated payload: expected " + std::to_string(expected) +
                                " bytes, found " + std::to_string(size));
  }
  if (size > expected) throw FormatError(expected, "trailing bytes after payload");

  const std::uint8_t* p = bytes.data() + header;
  const std::size_t n = static_cast<std::size_t>(count);
  switch (dt) {
    case DType::complex128: {
      std::vector<Complex> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = {get_f64(p + 16 * i), get_f64(p + 16 * i + 8)};
      a.data = std::move(v);
      break;
    }
    case DType::float64: {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = get_f64(p + 8 * i);
      a.data = std::move(v);
      break;
    }
    case DType::uint8: {
      std::vector<std::uint8_t> v(p, p + n);
      if (a.kind == ArrayKind::mask) {
        for (std::size_t i = 0; i < n; ++i) {
          if (v[i] > 1) throw FormatError(header + i, "mask entry is not 0 or 1");
        }
      }
      a.data = std::move(v);
      break;
    }
  }
  return a;
}

void write_array(const std::filesystem::path& path, const StoredArray& a) {
  const auto bytes = encode(a);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

StoredArray read_array(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode(bytes);
}

StoredArray from_kspace(const MultiCoilKSpace& y) {
  return {ArrayKind::kspace, dims_of({y.coils(), y.frames(), y.rows(), y.cols()}), y.storage()};
}

StoredArray from_image(const DynamicImage& x) {
  return {ArrayKind::image, dims_of({x.frames(), x.rows(), x.cols()}), x.storage()};
}

StoredArray from_real_image(const RealVolume& x) {
  return {ArrayKind::image, dims_of({x.extent(0), x.extent(1), x.extent(2)}), x.storage()};
}

StoredArray from_real_image(const RealGrid& x) {
  return {ArrayKind::image, dims_of({x.extent(0), x.extent(1)}), x.storage()};
}

StoredArray from_maps(const SensitivityMaps& s) {
  return {ArrayKind::maps, dims_of({s.coils(), s.rows(), s.cols()}), s.storage()};
}

StoredArray from_mask(const SamplingMask& m) {
  return {ArrayKind::mask, dims_of({m.frames(), m.rows(), m.cols()}), m.storage()};
}

MultiCoilKSpace to_kspace(const StoredArray& a) {
  if (a.kind != ArrayKind::kspace || a.dims.size() != 4) kind_mismatch(a, "k-space");
  const auto& v = payload<Complex>(a, "k-space");
  return MultiCoilKSpace(NdArray<Complex, 4>({a.dims[0], a.dims[1], a.dims[2], a.dims[3]}, v));
}

DynamicImage to_image(const StoredArray& a) {
  if (a.kind != ArrayKind::image || (a.dims.size() != 2 && a.dims.size() != 3)) {
    kind_mismatch(a, "image");
  }
  const std::size_t nf = a.dims.size() == 3 ? a.dims[0] : 1;
  const std::size_t ny = a.dims[a.dims.size() - 2], nx = a.dims.back();
  if (std::holds_alternative<std::vector<double>>(a.data)) {
    const auto& v = std::get<std::vector<double>>(a.data);
    return DynamicImage(NdArray<Complex, 3>({nf, ny, nx}, std::vector<Complex>(v.begin(), v.end())));
  }
  return DynamicImage(NdArray<Complex, 3>({nf, ny, nx}, payload<Complex>(a, "image")));
}

SensitivityMaps to_maps(const StoredArray& a) {
  if (a.kind != ArrayKind::maps || a.dims.size() != 3) kind_mismatch(a, "maps");
  return SensitivityMaps(NdArray<Complex, 3>({a.dims[0], a.dims[1], a.dims[2]},
                                             payload<Complex>(a, "maps")));
}

SamplingMask to_mask(const StoredArray& a) {
  if (a.kind != ArrayKind::mask || a.dims.size() != 3) kind_mismatch(a, "mask");
  return SamplingMask(NdArray<std::uint8_t, 3>({a.dims[0], a.dims[1], a.dims[2]},
                                               payload<std::uint8_t>(a, "mask")));
}

void write_kspace(const std::filesystem::path& p, const MultiCoilKSpace& y) {
  write_array(p, from_kspace(y));
}
void write_image(const std::filesystem::path& p, const DynamicImage& x) {
  write_array(p, from_image(x));
}
void write_maps(const std::filesystem::path& p, const SensitivityMaps& s) {
  write_array(p, from_maps(s));
}
void write_mask(const std::filesystem::path& p, const SamplingMask& m) {
  write_array(p, from_mask(m));
}
MultiCoilKSpace read_kspace(const std::filesystem::path& p) { return to_kspace(read_array(p)); }
DynamicImage read_image(const std::filesystem::path& p) { return to_image(read_array(p)); }
SensitivityMaps read_maps(const std::filesystem::path& p) { return to_maps(read_array(p)); }
SamplingMask read_mask(const std::filesystem::path& p) { return to_mask(read_array(p)); }

std::string format_report_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<ReconReport> sorted_reports(std::vector<ReconReport> reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    return std::tie(a.method, a.volume) < std::tie(b.method, b.volume);
  });
  return reports;
}

std::string report_csv(const std::vector<ReconReport>& reports) {
  std::string out = std::string(kReportHeader) + "\n";
  for (const auto& r : sorted_reports(reports)) {
    out += r.method + "," + r.volume + "," + format_report_value(r.acceleration) + "," + r.scheme +
           "," + format_report_value(r.ssim) + "," + format_report_value(r.ssim3d) + "," +
           format_report_value(r.psnr) + "," + format_report_value(r.nmse) + "," +
           format_report_value(r.wall_seconds) + "\n";
  }
  return out;
}

std::string report_json(const std::vector<ReconReport>& reports) {
  auto number = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : sorted_reports(reports)) {
    rows.push_back({{"method", r.method},
                    {"volume", r.volume},
                    {"acceleration", number(r.acceleration)},
                    {"scheme", r.scheme},
                    {"ssim", number(r.ssim)},
                    {"ssim3d", number(r.ssim3d)},
                    {"psnr", number(r.psnr)},
                    {"nmse", number(r.nmse)},
                    {"wall_seconds", number(r.wall_seconds)}});
  }
  return rows.dump(2) + "\n";
}

void write_report(const std::filesystem::path& csv_path, const std::vector<ReconReport>& reports) {
  if (reports.empty()) throw InvalidParameterError("write_report: no reports");
  auto write_text = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
    f << text;
    if (!f) throw IoError("write to '" + p.string() + "' failed");
  };
  write_text(csv_path, report_csv(reports));
  auto json_path = csv_path;
  json_path.replace_extension(".json");
  write_text(json_path, report_json(reports));
}

}  // namespace cmr
