#include "cmr/arn.hpp"

namespace cmr {

void ArnConfig::validate() const {
  if (cascades < 1) throw InvalidParameterError("arn: cascades must be >= 1");
  if (!(eta > 0.0 && eta <= 2.0)) throw InvalidParameterError("arn: eta must lie in (0, 2]");
  regularizer.validate();
}

MultiCoilKSpace cascade_step(const MultiCoilKSpace& k, const MultiCoilKSpace& y,
                             const AcquisitionOperator& op, const ArnConfig& cfg) {
  require_same_shape(k, y, "cascade_step");
  if (k.coils() != op.coils() || k.frames() != op.frames() || k.rows() != op.rows() ||
      k.cols() != op.cols()) {
    throw DimensionError("cascade_step: k-space " + shape_string(k) + " does not match operator");
  }

  // Data term. eta = 1 is a full replacement, written as such so the sampled
  // entries come out bitwise equal to y.
  MultiCoilKSpace out = k;
  const std::size_t n = k.rows() * k.cols();
  for (std::size_t c = 0; c < k.coils(); ++c) {
    for (std::size_t f = 0; f < k.frames(); ++f) {
      auto o = out.plane(c, f);
      auto yy = y.plane(c, f);
      auto m = op.mask().frame(f);
      for (std::size_t i = 0; i < n; ++i) {
        if (!m[i]) continue;
        o[i] = cfg.eta == 1.0 ? yy[i] : o[i] - cfg.eta * (o[i] - yy[i]);
      }
    }
  }

  // Regularizer correction, evaluated on the incoming k.
  if (cfg.regularizer.kind != DenoiserKind::identity && cfg.regularizer.lambda > 0.0) {
    const DynamicImage m = coil_combine(k, op.maps());
    const DynamicImage zero(m.frames(), m.rows(), m.cols());
    DynamicImage correction = denoise(m, m, zero, 1.0, cfg.regularizer);
    auto c = correction.flat();
    auto mf = m.flat();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= mf[i];
    const MultiCoilKSpace expanded = expand(correction, op.maps());
    auto o = out.flat();
    auto e = expanded.flat();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += e[i];
  }
  return out;
}

MultiCoilKSpace refine(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                       const ArnConfig& cfg) {
  cfg.validate();
  MultiCoilKSpace k = y;
  for (int t = 0; t < cfg.cascades; ++t) k = cascade_step(k, y, op, cfg);
  return dc(k, y, op.mask());
}

DynamicImage init_z0(const MultiCoilKSpace& r, const AcquisitionOperator& op) {
  if (r.coils() != op.coils() || r.frames() != op.frames() || r.rows() != op.rows() ||
      r.cols() != op.cols()) {
    throw DimensionError("init_z0: k-space " + shape_string(r) + " does not match operator");
  }
  return coil_combine(r, op.maps());
}

}  // namespace cmr
