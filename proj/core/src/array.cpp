#include "cmr/array.hpp"

#include <cmath>

namespace cmr {

namespace {

void check_image_shape(std::size_t nf, std::size_t ny, std::size_t nx) {
  if (nf < 1 || ny < 2 || nx < 2) {
    throw DimensionError("DynamicImage requires nf >= 1, ny >= 2, nx >= 2; got " +
                         std::to_string(nf) + "x" + std::to_string(ny) + "x" + std::to_string(nx));
  }
}

}  // namespace

DynamicImage::DynamicImage(std::size_t nf, std::size_t ny, std::size_t nx)
    : NdArray<Complex, 3>({nf, ny, nx}) {
  check_image_shape(nf, ny, nx);
}

DynamicImage::DynamicImage(NdArray<Complex, 3> a) : NdArray<Complex, 3>(std::move(a)) {
  check_image_shape(extent(0), extent(1), extent(2));
}

MultiCoilKSpace::MultiCoilKSpace(std::size_t nc, std::size_t nf, std::size_t ny, std::size_t nx)
    : NdArray<Complex, 4>({nc, nf, ny, nx}) {
  if (nc < 1) throw DimensionError("MultiCoilKSpace requires at least one coil");
  check_image_shape(nf, ny, nx);
}

MultiCoilKSpace::MultiCoilKSpace(NdArray<Complex, 4> a) : NdArray<Complex, 4>(std::move(a)) {
  if (extent(0) < 1) throw DimensionError("MultiCoilKSpace requires at least one coil");
  check_image_shape(extent(1), extent(2), extent(3));
}

std::span<Complex> MultiCoilKSpace::plane(std::size_t coil, std::size_t f) {
  const std::size_t n = rows() * cols();
  return flat().subspan((coil * frames() + f) * n, n);
}

std::span<const Complex> MultiCoilKSpace::plane(std::size_t coil, std::size_t f) const {
  const std::size_t n = rows() * cols();
  return flat().subspan((coil * frames() + f) * n, n);
}

SensitivityMaps::SensitivityMaps(std::size_t nc, std::size_t ny, std::size_t nx)
    : NdArray<Complex, 3>({nc, ny, nx}), support_(ny * nx, 1) {
  if (nc < 1) throw DimensionError("SensitivityMaps requires at least one coil");
}

SensitivityMaps::SensitivityMaps(NdArray<Complex, 3> a)
    : NdArray<Complex, 3>(std::move(a)), support_(extent(1) * extent(2), 1) {
  if (extent(0) < 1) throw DimensionError("SensitivityMaps requires at least one coil");
}

SamplingMask::SamplingMask(std::size_t nf, std::size_t ny, std::size_t nx, std::uint8_t fill)
    : NdArray<std::uint8_t, 3>({nf, ny, nx}, fill) {
  if (fill > 1) throw InvalidSpecError("mask entries must be 0 or 1");
}

SamplingMask::SamplingMask(NdArray<std::uint8_t, 3> a) : NdArray<std::uint8_t, 3>(std::move(a)) {
  for (auto v : flat()) {
    if (v > 1) throw InvalidSpecError("mask entries must be 0 or 1");
  }
}

SamplingMask SamplingMask::from_columns(std::size_t ny, std::size_t nx,
                                        const std::vector<std::vector<int>>& columns) {
  SamplingMask m(columns.size(), ny, nx);
  for (std::size_t f = 0; f < columns.size(); ++f) {
    for (int c : columns[f]) {
      if (c < 0 || static_cast<std::size_t>(c) >= nx) {
        throw InvalidSpecError("column index " + std::to_string(c) + " out of range");
      }
      for (std::size_t r = 0; r < ny; ++r) m(f, r, static_cast<std::size_t>(c)) = 1;
    }
  }
  m.cartesian_columns_ = columns;
  return m;
}

std::size_t SamplingMask::sampled_count() const {
  std::size_t n = 0;
  for (auto v : flat()) n += v;
  return n;
}

RealVolume rss_combine(const CoilImages& coil_images) {
  const auto& s = coil_images.shape();
  if (s[0] < 1) throw DimensionError("rss_combine: need at least one coil");
  RealVolume out({s[1], s[2], s[3]});
  const std::size_t n = out.size();
  auto src = coil_images.flat();
  auto dst = out.flat();
  for (std::size_t k = 0; k < s[0]; ++k) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += std::norm(src[k * n + i]);
  }
  for (auto& v : dst) v = std::sqrt(v);
  return out;
}

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) {
    throw DimensionError("inner_product: length mismatch " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    // a * conj(b)
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
  }
  return {re, im};
}

double norm2(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return std::sqrt(s);
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

bool all_finite(std::span<const Complex> a) {
  for (const auto& v : a) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

RealVolume magnitude(const DynamicImage& x) {
  RealVolume out({x.frames(), x.rows(), x.cols()});
  auto src = x.flat();
  auto dst = out.flat();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::abs(src[i]);
  return out;
}

}  // namespace cmr
