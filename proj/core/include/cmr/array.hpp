#pragma once

// Complex multidimensional containers shared by every module. Axis order is
// fixed as (coil, frame, row, column) with absent axes dropped; storage is
// row-major.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmr/error.hpp"

namespace cmr {

using Complex = std::complex<double>;

template <class T, std::size_t Rank>
class NdArray {
 public:
  using value_type = T;
  using Shape = std::array<std::size_t, Rank>;
  static constexpr std::size_t rank = Rank;

  NdArray() { shape_.fill(0); }

  explicit NdArray(const Shape& shape, T fill = T{}) : shape_(shape), data_(count(shape), fill) {}

  NdArray(const Shape& shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != count(shape)) {
      throw DimensionError("NdArray: data length " + std::to_string(data_.size()) +
                           " does not match shape volume " + std::to_string(count(shape)));
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t extent(std::size_t axis) const { return shape_[axis]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  template <class... I>
  std::size_t offset(I... idx) const {
    static_assert(sizeof...(I) == Rank, "index count must equal rank");
    const std::array<std::size_t, Rank> ix{static_cast<std::size_t>(idx)...};
    std::size_t off = 0;
    for (std::size_t a = 0; a < Rank; ++a) off = off * shape_[a] + ix[a];
    return off;
  }

  template <class... I>
  T& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  // Contiguous block selected by the leading index.
  std::span<T> slice(std::size_t lead) {
    const std::size_t n = inner_count();
    return std::span<T>(data_).subspan(lead * n, n);
  }
  std::span<const T> slice(std::size_t lead) const {
    const std::size_t n = inner_count();
    return std::span<const T>(data_).subspan(lead * n, n);
  }

  std::size_t inner_count() const {
    std::size_t n = 1;
    for (std::size_t a = 1; a < Rank; ++a) n *= shape_[a];
    return n;
  }

  bool same_shape(const NdArray& other) const { return shape_ == other.shape_; }

  friend bool operator==(const NdArray& a, const NdArray& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

  static std::size_t count(const Shape& shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
  }

 private:
  Shape shape_;
  std::vector<T> data_;
};

template <class T, std::size_t R>
std::string shape_string(const NdArray<T, R>& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < R; ++i) {
    if (i) s += "x";
    s += std::to_string(a.extent(i));
  }
  return s + ")";
}

template <class A, class B>
void require_same_shape(const A& a, const B& b, const char* where) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(where) + ": shape mismatch " + shape_string(a) + " vs " +
                         shape_string(b));
  }
}

using ComplexGrid = NdArray<Complex, 2>;
using RealGrid = NdArray<double, 2>;
using RealVolume = NdArray<double, 3>;
using CoilImages = NdArray<Complex, 4>;

// Complex image sequence, axes (frame, row, column).
class DynamicImage : public NdArray<Complex, 3> {
 public:
  DynamicImage() = default;
  DynamicImage(std::size_t nf, std::size_t ny, std::size_t nx);
  explicit DynamicImage(NdArray<Complex, 3> a);

  std::size_t frames() const { return extent(0); }
  std::size_t rows() const { return extent(1); }
  std::size_t cols() const { return extent(2); }
  std::span<Complex> frame(std::size_t f) { return slice(f); }
  std::span<const Complex> frame(std::size_t f) const { return slice(f); }
};

// Complex k-space samples, axes (coil, frame, row, column).
class MultiCoilKSpace : public NdArray<Complex, 4> {
 public:
  MultiCoilKSpace() = default;
  MultiCoilKSpace(std::size_t nc, std::size_t nf, std::size_t ny, std::size_t nx);
  explicit MultiCoilKSpace(NdArray<Complex, 4> a);

  std::size_t coils() const { return extent(0); }
  std::size_t frames() const { return extent(1); }
  std::size_t rows() const { return extent(2); }
  std::size_t cols() const { return extent(3); }
  std::span<Complex> plane(std::size_t coil, std::size_t f);
  std::span<const Complex> plane(std::size_t coil, std::size_t f) const;
};

// One spatial map per coil, shared by all frames. `support` flags pixels where
// calibration found signal; synthetic maps mark every pixel.
class SensitivityMaps : public NdArray<Complex, 3> {
 public:
  SensitivityMaps() = default;
  SensitivityMaps(std::size_t nc, std::size_t ny, std::size_t nx);
  explicit SensitivityMaps(NdArray<Complex, 3> a);

  std::size_t coils() const { return extent(0); }
  std::size_t rows() const { return extent(1); }
  std::size_t cols() const { return extent(2); }
  std::span<const Complex> map(std::size_t coil) const { return slice(coil); }
  std::span<Complex> map(std::size_t coil) { return slice(coil); }

  std::vector<std::uint8_t>& support() { return support_; }
  const std::vector<std::uint8_t>& support() const { return support_; }

 private:
  std::vector<std::uint8_t> support_;
};

// Binary sampling pattern, axes (frame, row, column).
class SamplingMask : public NdArray<std::uint8_t, 3> {
 public:
  SamplingMask() = default;
  SamplingMask(std::size_t nf, std::size_t ny, std::size_t nx, std::uint8_t fill = 0);
  explicit SamplingMask(NdArray<std::uint8_t, 3> a);

  // Builds a Cartesian mask from per-frame column lists.
  static SamplingMask from_columns(std::size_t ny, std::size_t nx,
                                   const std::vector<std::vector<int>>& columns);

  std::size_t frames() const { return extent(0); }
  std::size_t rows() const { return extent(1); }
  std::size_t cols() const { return extent(2); }
  std::span<const std::uint8_t> frame(std::size_t f) const { return slice(f); }
  std::span<std::uint8_t> frame(std::size_t f) { return slice(f); }

  const std::optional<std::vector<std::vector<int>>>& cartesian_columns() const {
    return cartesian_columns_;
  }
  std::size_t sampled_count() const;

 private:
  std::optional<std::vector<std::vector<int>>> cartesian_columns_;
};

// Root-sum-of-squares over the coil axis.
RealVolume rss_combine(const CoilImages& coil_images);

// Sum of a_i * conj(b_i) in flat row-major order.
Complex inner_product(std::span<const Complex> a, std::span<const Complex> b);

template <std::size_t R>
Complex inner_product(const NdArray<Complex, R>& a, const NdArray<Complex, R>& b) {
  require_same_shape(a, b, "inner_product");
  return inner_product(a.flat(), b.flat());
}

double norm2(std::span<const Complex> a);
double norm2(std::span<const double> a);
bool all_finite(std::span<const Complex> a);

RealVolume magnitude(const DynamicImage& x);

}  // namespace cmr
