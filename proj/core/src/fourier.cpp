#include "cmr/fourier.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace cmr {

namespace {

inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

struct Plan {
  std::size_t n = 0;
  // radix-2
  std::vector<std::uint32_t> bitrev;
  std::vector<Complex> twiddle;      // exp(-2 pi i k / n), k < n/2
  std::vector<Complex> twiddle_inv;  // conjugates
  // Bluestein
  std::size_t m = 0;
  std::vector<Complex> chirp;  // exp(-i pi k^2 / n)
  std::vector<Complex> kernel_hat;
  std::shared_ptr<const Plan> inner;
};

std::shared_ptr<const Plan> get_plan(std::size_t n);

std::shared_ptr<const Plan> make_plan(std::size_t n) {
  auto p = std::make_shared<Plan>();
  p->n = n;
  if (is_pow2(n)) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    p->bitrev.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      p->bitrev[i] = static_cast<std::uint32_t>(r);
    }
    p->twiddle.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      p->twiddle[k] = {std::cos(a), std::sin(a)};
    }
    p->twiddle_inv.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) p->twiddle_inv[k] = std::conj(p->twiddle[k]);
    return p;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  p->m = m;
  p->inner = get_plan(m);
  p->chirp.resize(n);
  const std::size_t two_n = 2 * n;
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for large k.
    const std::size_t k2 = (k * k) % two_n;
    const double a = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    p->chirp[k] = {std::cos(a), std::sin(a)};
  }
  p->kernel_hat.assign(m, Complex{});
  p->kernel_hat[0] = std::conj(p->chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    p->kernel_hat[k] = std::conj(p->chirp[k]);
    p->kernel_hat[m - k] = std::conj(p->chirp[k]);
  }
  fft1d(p->kernel_hat, false);
  return p;
}

std::shared_ptr<const Plan> get_plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const Plan>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  // Built outside the lock: Bluestein plans recurse into get_plan.
  auto plan = make_plan(n);
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(n, plan);
  return it->second;
}

void radix2(Complex* a, const Plan& p, bool inverse) {
  const std::size_t n = p.n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = p.bitrev[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  const Complex* tw = inverse ? p.twiddle_inv.data() : p.twiddle.data();
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const Complex u = a[i + j];
        const Complex v = mul(a[i + j + half], tw[j * step]);
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }
}

// Radix-2 along the row axis of a row-major ny x nx plane: every butterfly
// runs over whole rows so the inner loop is contiguous.
void radix2_columns(Complex* a, std::size_t nx, const Plan& p, bool inverse) {
  const std::size_t n = p.n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = p.bitrev[i];
    if (i < j) std::swap_ranges(a + i * nx, a + (i + 1) * nx, a + j * nx);
  }
  const Complex* tw = inverse ? p.twiddle_inv.data() : p.twiddle.data();
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const Complex w = tw[j * step];
        Complex* top = a + (i + j) * nx;
        Complex* bot = a + (i + j + half) * nx;
        for (std::size_t c = 0; c < nx; ++c) {
          const Complex u = top[c];
          const Complex v = mul(bot[c], w);
          top[c] = u + v;
          bot[c] = u - v;
        }
      }
    }
  }
}

void transform(std::span<Complex> data, const Plan& p, bool inverse);

void bluestein(std::span<Complex> data, const Plan& p, bool inverse) {
  const std::size_t n = p.n;
  std::vector<Complex> work(p.m, Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    const Complex x = inverse ? std::conj(data[k]) : data[k];
    work[k] = mul(x, p.chirp[k]);
  }
  radix2(work.data(), *p.inner, false);
  for (std::size_t k = 0; k < p.m; ++k) work[k] = mul(work[k], p.kernel_hat[k]);
  radix2(work.data(), *p.inner, true);
  const double scale = 1.0 / static_cast<double>(p.m);
  for (std::size_t k = 0; k < n; ++k) {
    Complex v = mul(work[k], p.chirp[k]) * scale;
    data[k] = inverse ? std::conj(v) : v;
  }
}

void transform_plane(std::span<Complex> plane, std::size_t ny, std::size_t nx, bool inverse) {
  if (plane.size() != ny * nx) throw DimensionError("fft2c: plane size does not match ny*nx");
  if (ny < 2 || nx < 2) throw DimensionError("fft2c: ny and nx must be >= 2");
  const auto row_plan = get_plan(nx);
  const auto col_plan = get_plan(ny);

  // Input shift (ifftshift): moves the centre sample to index 0.
  thread_local std::vector<Complex> tmp;
  tmp.resize(plane.size());
  const std::size_t sy_in = ny / 2, sx_in = nx / 2;
  for (std::size_t r = 0; r < ny; ++r) {
    const Complex* src = plane.data() + ((r + sy_in) % ny) * nx;
    Complex* dst = tmp.data() + r * nx;
    std::copy(src + sx_in, src + nx, dst);
    std::copy(src, src + sx_in, dst + (nx - sx_in));
  }

  for (std::size_t r = 0; r < ny; ++r) {
    transform(std::span<Complex>(tmp).subspan(r * nx, nx), *row_plan, inverse);
  }
  if (col_plan->m == 0) {
    radix2_columns(tmp.data(), nx, *col_plan, inverse);
  } else {
    thread_local std::vector<Complex> col;
    col.resize(ny);
    for (std::size_t c = 0; c < nx; ++c) {
      for (std::size_t r = 0; r < ny; ++r) col[r] = tmp[r * nx + c];
      transform(col, *col_plan, inverse);
      for (std::size_t r = 0; r < ny; ++r) tmp[r * nx + c] = col[r];
    }
  }

  // Output shift (fftshift) and orthonormal scaling.
  const double scale = 1.0 / std::sqrt(static_cast<double>(ny * nx));
  const std::size_t sy_out = ny - ny / 2, sx_out = nx - nx / 2;
  for (std::size_t r = 0; r < ny; ++r) {
    const Complex* src = tmp.data() + ((r + sy_out) % ny) * nx;
    Complex* dst = plane.data() + r * nx;
    for (std::size_t c = 0; c < nx - sx_out; ++c) dst[c] = src[c + sx_out] * scale;
    for (std::size_t c = nx - sx_out; c < nx; ++c) dst[c] = src[c - (nx - sx_out)] * scale;
  }
}

ComplexGrid transform_grid(const ComplexGrid& frame, bool inverse) {
  if (!all_finite(frame.flat())) throw NumericError("fft2c: non-finite input");
  ComplexGrid out = frame;
  transform_plane(out.flat(), frame.extent(0), frame.extent(1), inverse);
  return out;
}

void check_operator_image(const DynamicImage& x, const AcquisitionOperator& op, const char* where) {
  if (x.frames() != op.frames() || x.rows() != op.rows() || x.cols() != op.cols()) {
    throw DimensionError(std::string(where) + ": image " + shape_string(x) +
                         " does not match operator (" + std::to_string(op.frames()) + "x" +
                         std::to_string(op.rows()) + "x" + std::to_string(op.cols()) + ")");
  }
}

void check_operator_kspace(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                           const char* where) {
  if (y.coils() != op.coils() || y.frames() != op.frames() || y.rows() != op.rows() ||
      y.cols() != op.cols()) {
    throw DimensionError(std::string(where) + ": k-space " + shape_string(y) +
                         " does not match operator");
  }
}

}  // namespace

namespace {

void transform(std::span<Complex> data, const Plan& p, bool inverse) {
  if (p.n <= 1) return;
  if (p.m == 0) {
    radix2(data.data(), p, inverse);
  } else {
    bluestein(data, p, inverse);
  }
}

}  // namespace

void fft1d(std::span<Complex> data, bool inverse) {
  if (data.size() <= 1) return;
  transform(data, *get_plan(data.size()), inverse);
}

void fft2c_inplace(std::span<Complex> plane, std::size_t ny, std::size_t nx) {
  transform_plane(plane, ny, nx, false);
}

void ifft2c_inplace(std::span<Complex> plane, std::size_t ny, std::size_t nx) {
  transform_plane(plane, ny, nx, true);
}

ComplexGrid fft2c(const ComplexGrid& frame) { return transform_grid(frame, false); }
ComplexGrid ifft2c(const ComplexGrid& frame) { return transform_grid(frame, true); }

AcquisitionOperator::AcquisitionOperator(SensitivityMaps maps, SamplingMask mask)
    : maps_(std::move(maps)), mask_(std::move(mask)) {
  if (maps_.rows() != mask_.rows() || maps_.cols() != mask_.cols()) {
    throw DimensionError("AcquisitionOperator: maps " + shape_string(maps_) +
                         " and mask " + shape_string(mask_) + " spatial shapes differ");
  }
}

MultiCoilKSpace expand(const DynamicImage& x, const SensitivityMaps& maps) {
  if (x.rows() != maps.rows() || x.cols() != maps.cols()) {
    throw DimensionError("expand: image " + shape_string(x) + " vs maps " + shape_string(maps));
  }
  const std::size_t nc = maps.coils(), nf = x.frames(), ny = x.rows(), nx = x.cols();
  const std::size_t n = ny * nx;
  MultiCoilKSpace out(nc, nf, ny, nx);
  for (std::size_t k = 0; k < nc; ++k) {
    auto s = maps.map(k);
    for (std::size_t f = 0; f < nf; ++f) {
      auto dst = out.plane(k, f);
      auto src = x.frame(f);
      for (std::size_t i = 0; i < n; ++i) dst[i] = mul(s[i], src[i]);
      fft2c_inplace(dst, ny, nx);
    }
  }
  return out;
}

namespace {

// Sum_c conj(S_c) * IFFT(k_c), optionally zeroing unsampled entries first.
DynamicImage combine(const MultiCoilKSpace& k, const SensitivityMaps& maps,
                     const SamplingMask* mask) {
  if (k.coils() != maps.coils() || k.rows() != maps.rows() || k.cols() != maps.cols()) {
    throw DimensionError("coil_combine: k-space " + shape_string(k) + " vs maps " +
                         shape_string(maps));
  }
  const std::size_t nc = k.coils(), nf = k.frames(), ny = k.rows(), nx = k.cols();
  const std::size_t n = ny * nx;
  DynamicImage out(nf, ny, nx);
  thread_local std::vector<Complex> buf;
  buf.resize(n);
  for (std::size_t c = 0; c < nc; ++c) {
    auto s = maps.map(c);
    for (std::size_t f = 0; f < nf; ++f) {
      auto src = k.plane(c, f);
      if (mask) {
        auto m = mask->frame(f);
        for (std::size_t i = 0; i < n; ++i) buf[i] = m[i] ? src[i] : Complex{};
      } else {
        std::copy(src.begin(), src.end(), buf.begin());
      }
      ifft2c_inplace(buf, ny, nx);
      auto dst = out.frame(f);
      for (std::size_t i = 0; i < n; ++i) dst[i] += mul(std::conj(s[i]), buf[i]);
    }
  }
  return out;
}

}  // namespace

DynamicImage coil_combine(const MultiCoilKSpace& k, const SensitivityMaps& maps) {
  return combine(k, maps, nullptr);
}

namespace {

// A^H (A x - y), or A^H A x when y is null.
DynamicImage normal_residual(const DynamicImage& x, const MultiCoilKSpace* y,
                             const AcquisitionOperator& op) {
  check_operator_image(x, op, "normal_residual");
  if (y) check_operator_kspace(*y, op, "normal_residual");
  const SensitivityMaps& maps = op.maps();
  const std::size_t nc = maps.coils(), nf = x.frames(), ny = x.rows(), nx = x.cols();
  const std::size_t n = ny * nx;
  DynamicImage out(nf, ny, nx);
  thread_local std::vector<Complex> buf;
  buf.resize(n);
  for (std::size_t c = 0; c < nc; ++c) {
    auto s = maps.map(c);
    for (std::size_t f = 0; f < nf; ++f) {
      auto src = x.frame(f);
      for (std::size_t i = 0; i < n; ++i) buf[i] = mul(s[i], src[i]);
      fft2c_inplace(buf, ny, nx);
      auto m = op.mask().frame(f);
      if (y) {
        auto yk = y->plane(c, f);
        for (std::size_t i = 0; i < n; ++i) buf[i] = m[i] ? buf[i] - yk[i] : Complex{};
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          if (!m[i]) buf[i] = Complex{};
        }
      }
      ifft2c_inplace(buf, ny, nx);
      auto dst = out.frame(f);
      for (std::size_t i = 0; i < n; ++i) dst[i] += mul(std::conj(s[i]), buf[i]);
    }
  }
  return out;
}

}  // namespace

DynamicImage gramian(const DynamicImage& x, const AcquisitionOperator& op) {
  return normal_residual(x, nullptr, op);
}

DynamicImage data_gradient(const DynamicImage& x, const MultiCoilKSpace& y,
                           const AcquisitionOperator& op) {
  return normal_residual(x, &y, op);
}

MultiCoilKSpace forward(const DynamicImage& x, const AcquisitionOperator& op) {
  check_operator_image(x, op, "forward");
  MultiCoilKSpace out = expand(x, op.maps());
  const std::size_t n = op.rows() * op.cols();
  for (std::size_t k = 0; k < out.coils(); ++k) {
    for (std::size_t f = 0; f < out.frames(); ++f) {
      auto p = out.plane(k, f);
      auto m = op.mask().frame(f);
      for (std::size_t i = 0; i < n; ++i) {
        if (!m[i]) p[i] = Complex{};
      }
    }
  }
  return out;
}

DynamicImage adjoint(const MultiCoilKSpace& y, const AcquisitionOperator& op) {
  check_operator_kspace(y, op, "adjoint");
  return combine(y, op.maps(), &op.mask());
}

MultiCoilKSpace dc(const MultiCoilKSpace& w, const MultiCoilKSpace& y, const SamplingMask& mask) {
  require_same_shape(w, y, "dc");
  if (mask.frames() != y.frames() || mask.rows() != y.rows() || mask.cols() != y.cols()) {
    throw DimensionError("dc: mask " + shape_string(mask) + " vs k-space " + shape_string(y));
  }
  MultiCoilKSpace out = w;
  const std::size_t n = y.rows() * y.cols();
  for (std::size_t k = 0; k < y.coils(); ++k) {
    for (std::size_t f = 0; f < y.frames(); ++f) {
      auto dst = out.plane(k, f);
      auto src = y.plane(k, f);
      auto m = mask.frame(f);
      for (std::size_t i = 0; i < n; ++i) {
        if (m[i]) dst[i] = src[i];
      }
    }
  }
  return out;
}

ProjectedIterate project_iterate(const DynamicImage& x, const MultiCoilKSpace& y,
                                 const AcquisitionOperator& op) {
  check_operator_image(x, op, "project_iterate");
  check_operator_kspace(y, op, "project_iterate");
  MultiCoilKSpace y_hat = dc(expand(x, op.maps()), y, op.mask());
  DynamicImage x_hat = coil_combine(y_hat, op.maps());
  return {std::move(x_hat), std::move(y_hat)};
}

}  // namespace cmr
