#include "cmr/vsharp.hpp"

namespace cmr {

std::string to_string(UInit u) { return u == UInit::zero ? "zero" : "scaled_adjoint"; }

UInit parse_u_init(const std::string& name) {
  if (name == "zero") return UInit::zero;
  if (name == "scaled_adjoint" || name == "scaled-adjoint") return UInit::scaled_adjoint;
  throw InvalidParameterError("unknown u_init '" + name + "'");
}

void VSharpConfig::validate() const {
  if (iterations < 1) throw InvalidParameterError("vsharp: N must be >= 1");
  if (x_steps < 1) throw InvalidParameterError("vsharp: Nx must be >= 1");
  if (!(rho > 0.0)) throw InvalidParameterError("vsharp: rho must be > 0");
  if (step_size && !(*step_size > 0.0)) throw InvalidParameterError("vsharp: step size must be > 0");
  denoiser.validate();
}

InitialState initialize(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                        const VSharpConfig& cfg, const std::optional<DynamicImage>& z0_override) {
  DynamicImage x0 = adjoint(y, op);
  DynamicImage z0 = x0;
  if (z0_override) {
    require_same_shape(*z0_override, x0, "initialize: z0 override");
    z0 = *z0_override;
  }
  DynamicImage u0(x0.frames(), x0.rows(), x0.cols());
  if (cfg.u_init == UInit::scaled_adjoint) {
    auto dst = u0.flat();
    auto src = x0.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 1e-3 * src[i];
  }
  return {std::move(z0), std::move(x0), std::move(u0)};
}

DynamicImage x_update(const DynamicImage& x, const DynamicImage& z_next, const DynamicImage& u,
                      const MultiCoilKSpace& y, const AcquisitionOperator& op,
                      const VSharpConfig& cfg) {
  require_same_shape(x, z_next, "x_update");
  require_same_shape(x, u, "x_update");
  const double eta = cfg.resolved_step();
  const double rho = cfg.rho;
  DynamicImage cur = x;
  for (int step = 0; step < cfg.x_steps; ++step) {
    const DynamicImage grad_data = data_gradient(cur, y, op);
    auto c = cur.flat();
    auto g = grad_data.flat();
    auto zf = z_next.flat();
    auto uf = u.flat();
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] -= eta * (g[i] + rho * (c[i] - zf[i]) + uf[i]);
    }
    if (!all_finite(c)) {
      throw DivergenceError("x_update: non-finite iterate at step " + std::to_string(step + 1) +
                            " (step size " + std::to_string(eta) + " too large?)");
    }
  }
  return cur;
}

DynamicImage u_update(const DynamicImage& u, const DynamicImage& x_next,
                      const DynamicImage& z_next, double rho) {
  require_same_shape(u, x_next, "u_update");
  require_same_shape(u, z_next, "u_update");
  DynamicImage out = u;
  auto o = out.flat();
  auto xf = x_next.flat();
  auto zf = z_next.flat();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += rho * (xf[i] - zf[i]);
  return out;
}

namespace {

double data_residual(const DynamicImage& x, const MultiCoilKSpace& y,
                     const AcquisitionOperator& op) {
  MultiCoilKSpace r = forward(x, op);
  auto rf = r.flat();
  auto yf = y.flat();
  for (std::size_t i = 0; i < rf.size(); ++i) rf[i] -= yf[i];
  return norm2(rf);
}

DynamicImage run(const MultiCoilKSpace& y, const AcquisitionOperator& op, const VSharpConfig& cfg,
                 const std::optional<DynamicImage>& z0_override, DynamicImage* z0_out,
                 const IterateObserver& observer, std::vector<double>* residuals) {
  cfg.validate();
  InitialState s = initialize(y, op, cfg, z0_override);
  if (z0_out) *z0_out = s.z0;
  DynamicImage x = std::move(s.x0);
  DynamicImage z = std::move(s.z0);
  DynamicImage u = std::move(s.u0);
  const double inv_rho = 1.0 / cfg.rho;

  for (int j = 1; j <= cfg.iterations; ++j) {
    DynamicImage u_scaled = u;
    for (auto& v : u_scaled.flat()) v *= inv_rho;
    z = denoise(x, z, u_scaled, cfg.rho, cfg.denoiser);
    x = x_update(x, z, u, y, op, cfg);

    MultiCoilKSpace y_hat;
    if (cfg.per_iterate_dc) {
      ProjectedIterate p = project_iterate(x, y, op);
      x = std::move(p.image);
      y_hat = std::move(p.kspace);
    } else {
      y_hat = expand(x, op.maps());
    }
    u = u_update(u, x, z, cfg.rho);

    if (residuals) residuals->push_back(data_residual(x, y, op));
    if (observer) observer(j, x, y_hat);
  }
  return x;
}

}  // namespace

SolveTrace reconstruct(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                       const VSharpConfig& cfg, const std::optional<DynamicImage>& z0_override) {
  SolveTrace trace;
  trace.iterates.reserve(static_cast<std::size_t>(std::max(cfg.iterations, 0)));
  run(y, op, cfg, z0_override, &trace.z0,
      [&](int, const DynamicImage& image, const MultiCoilKSpace& kspace) {
        trace.iterates.push_back({image, kspace});
      },
      &trace.residual_history);
  return trace;
}

DynamicImage reconstruct_final(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                               const VSharpConfig& cfg,
                               const std::optional<DynamicImage>& z0_override,
                               const IterateObserver& observer, std::vector<double>* residuals) {
  return run(y, op, cfg, z0_override, nullptr, observer, residuals);
}

}  // namespace cmr
