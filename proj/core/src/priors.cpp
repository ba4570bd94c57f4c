#include "cmr/priors.hpp"

#include <cmath>

namespace cmr {

std::string to_string(DenoiserKind k) {
  switch (k) {
    case DenoiserKind::identity:
      return "identity";
    case DenoiserKind::soft_threshold:
      return "soft_threshold";
    case DenoiserKind::wavelet_soft_threshold:
      return "wavelet";
    case DenoiserKind::tv:
      return "tv";
  }
  return "unknown";
}

DenoiserKind parse_denoiser_kind(const std::string& name) {
  if (name == "identity") return DenoiserKind::identity;
  if (name == "soft_threshold" || name == "soft-threshold") return DenoiserKind::soft_threshold;
  if (name == "wavelet" || name == "wavelet_soft_threshold") {
    return DenoiserKind::wavelet_soft_threshold;
  }
  if (name == "tv") return DenoiserKind::tv;
  throw InvalidParameterError("unknown denoiser '" + name + "'");
}

void DenoiserSpec::validate() const {
  if (!(lambda >= 0.0)) throw InvalidParameterError("denoiser lambda must be >= 0");
  if (tv_iterations < 1) throw InvalidParameterError("tv_iterations must be >= 1");
  if (wavelet_levels < 1) throw InvalidParameterError("wavelet_levels must be >= 1");
}

void soft_threshold_inplace(std::span<Complex> v, double threshold) {
  if (threshold <= 0.0) return;
  for (auto& c : v) {
    const double m = std::abs(c);
    c = m > threshold ? c * ((m - threshold) / m) : Complex{};
  }
}

ComplexGrid haar2d(const ComplexGrid& frame, bool inverse) {
  const std::size_t ny = frame.extent(0), nx = frame.extent(1);
  if (ny % 2 || nx % 2) {
    throw DimensionError("haar2d: grid " + shape_string(frame) + " must have even sides");
  }
  const std::size_t hy = ny / 2, hx = nx / 2;
  ComplexGrid out({ny, nx});
  for (std::size_t i = 0; i < hy; ++i) {
    for (std::size_t j = 0; j < hx; ++j) {
      if (!inverse) {
        const Complex a = frame(2 * i, 2 * j), b = frame(2 * i, 2 * j + 1);
        const Complex c = frame(2 * i + 1, 2 * j), d = frame(2 * i + 1, 2 * j + 1);
        out(i, j) = 0.5 * (a + b + c + d);
        out(i, j + hx) = 0.5 * (a - b + c - d);
        out(i + hy, j) = 0.5 * (a + b - c - d);
        out(i + hy, j + hx) = 0.5 * (a - b - c + d);
      } else {
        const Complex ll = frame(i, j), lh = frame(i, j + hx);
        const Complex hl = frame(i + hy, j), hh = frame(i + hy, j + hx);
        out(2 * i, 2 * j) = 0.5 * (ll + lh + hl + hh);
        out(2 * i, 2 * j + 1) = 0.5 * (ll - lh + hl - hh);
        out(2 * i + 1, 2 * j) = 0.5 * (ll + lh - hl - hh);
        out(2 * i + 1, 2 * j + 1) = 0.5 * (ll - lh - hl + hh);
      }
    }
  }
  return out;
}

namespace {

ComplexGrid top_left(const ComplexGrid& g, std::size_t ny, std::size_t nx) {
  ComplexGrid out({ny, nx});
  for (std::size_t r = 0; r < ny; ++r) {
    for (std::size_t c = 0; c < nx; ++c) out(r, c) = g(r, c);
  }
  return out;
}

void put_top_left(ComplexGrid& g, const ComplexGrid& block) {
  for (std::size_t r = 0; r < block.extent(0); ++r) {
    for (std::size_t c = 0; c < block.extent(1); ++c) g(r, c) = block(r, c);
  }
}

std::size_t round_up(std::size_t n, std::size_t m) { return (n + m - 1) / m * m; }

}  // namespace

HaarCoefficients haar2d_forward(const ComplexGrid& frame, int levels) {
  if (levels < 1) throw InvalidParameterError("haar2d_forward: levels must be >= 1");
  const std::size_t ny = frame.extent(0), nx = frame.extent(1);
  const std::size_t block = std::size_t{1} << levels;
  const std::size_t py = round_up(ny, block), px = round_up(nx, block);
  ComplexGrid padded({py, px});
  for (std::size_t r = 0; r < py; ++r) {
    for (std::size_t c = 0; c < px; ++c) padded(r, c) = frame(std::min(r, ny - 1), std::min(c, nx - 1));
  }
  std::size_t sy = py, sx = px;
  for (int l = 0; l < levels; ++l) {
    put_top_left(padded, haar2d(top_left(padded, sy, sx), false));
    sy /= 2;
    sx /= 2;
  }
  return {std::move(padded), ny, nx, levels};
}

ComplexGrid haar2d_inverse(const HaarCoefficients& hc) {
  ComplexGrid g = hc.coeffs;
  const std::size_t py = g.extent(0), px = g.extent(1);
  for (int l = hc.levels - 1; l >= 0; --l) {
    const std::size_t sy = py >> l, sx = px >> l;
    put_top_left(g, haar2d(top_left(g, sy, sx), true));
  }
  if (py == hc.rows && px == hc.cols) return g;
  return top_left(g, hc.rows, hc.cols);
}

ComplexGrid wavelet_prox(const ComplexGrid& v, double threshold, int levels) {
  HaarCoefficients hc = haar2d_forward(v, levels);
  soft_threshold_inplace(hc.coeffs.flat(), threshold);
  return haar2d_inverse(hc);
}

double total_variation(const ComplexGrid& v) {
  const std::size_t ny = v.extent(0), nx = v.extent(1);
  double tv = 0.0;
  for (std::size_t r = 0; r < ny; ++r) {
    for (std::size_t c = 0; c < nx; ++c) {
      const Complex gx = c + 1 < nx ? v(r, c + 1) - v(r, c) : Complex{};
      const Complex gy = r + 1 < ny ? v(r + 1, c) - v(r, c) : Complex{};
      tv += std::sqrt(std::norm(gx) + std::norm(gy));
    }
  }
  return tv;
}

ComplexGrid tv_prox(const ComplexGrid& v, double weight, int iterations) {
  if (weight <= 0.0) return v;
  const std::size_t ny = v.extent(0), nx = v.extent(1);
  const std::size_t n = ny * nx;
  std::vector<Complex> px(n), py(n), div(n), d(n);

  auto divergence = [&](std::vector<Complex>& out) {
    for (std::size_t r = 0; r < ny; ++r) {
      for (std::size_t c = 0; c < nx; ++c) {
        const std::size_t i = r * nx + c;
        Complex dx = (c + 1 < nx ? px[i] : Complex{}) - (c > 0 ? px[i - 1] : Complex{});
        Complex dy = (r + 1 < ny ? py[i] : Complex{}) - (r > 0 ? py[i - nx] : Complex{});
        out[i] = dx + dy;
      }
    }
  };

  const double inv_w = 1.0 / weight;
  for (int it = 0; it < iterations; ++it) {
    divergence(div);
    for (std::size_t i = 0; i < n; ++i) d[i] = div[i] - v.flat()[i] * inv_w;
    for (std::size_t r = 0; r < ny; ++r) {
      for (std::size_t c = 0; c < nx; ++c) {
        const std::size_t i = r * nx + c;
        const Complex gx = c + 1 < nx ? d[i + 1] - d[i] : Complex{};
        const Complex gy = r + 1 < ny ? d[i + nx] - d[i] : Complex{};
        const double denom = 1.0 + kTvStep * std::sqrt(std::norm(gx) + std::norm(gy));
        px[i] = (px[i] + kTvStep * gx) / denom;
        py[i] = (py[i] + kTvStep * gy) / denom;
      }
    }
  }
  divergence(div);
  ComplexGrid out({ny, nx});
  for (std::size_t i = 0; i < n; ++i) out.flat()[i] = v.flat()[i] - weight * div[i];
  return out;
}

DynamicImage denoise(const DynamicImage& x, const DynamicImage& z, const DynamicImage& u_over_rho,
                     double rho, const DenoiserSpec& spec) {
  if (!(rho > 0.0)) throw InvalidParameterError("denoise: rho must be > 0");
  spec.validate();
  require_same_shape(x, u_over_rho, "denoise");
  require_same_shape(x, z, "denoise");

  DynamicImage v = x;
  {
    auto dst = v.flat();
    auto src = u_over_rho.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  const double threshold = spec.lambda / rho;
  if (spec.kind == DenoiserKind::identity || threshold == 0.0) return v;
  if (spec.kind == DenoiserKind::soft_threshold) {
    soft_threshold_inplace(v.flat(), threshold);
    return v;
  }

  const std::size_t ny = v.rows(), nx = v.cols();
  for (std::size_t f = 0; f < v.frames(); ++f) {
    auto plane = v.frame(f);
    ComplexGrid g({ny, nx}, std::vector<Complex>(plane.begin(), plane.end()));
    ComplexGrid out = spec.kind == DenoiserKind::tv ? tv_prox(g, threshold, spec.tv_iterations)
                                                    : wavelet_prox(g, threshold, spec.wavelet_levels);
    std::copy(out.flat().begin(), out.flat().end(), plane.begin());
  }
  return v;
}

}  // namespace cmr
