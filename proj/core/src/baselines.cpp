#include "cmr/baselines.hpp"

#include <cmath>

namespace cmr {

DynamicImage zero_filled(const MultiCoilKSpace& y, const AcquisitionOperator& op) {
  return adjoint(y, op);
}

namespace {

DynamicImage normal_op(const DynamicImage& x, const AcquisitionOperator& op, double mu) {
  DynamicImage out = gramian(x, op);
  auto o = out.flat();
  auto xf = x.flat();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += mu * xf[i];
  return out;
}

}  // namespace

DynamicImage cg_sense(const MultiCoilKSpace& y, const AcquisitionOperator& op,
                      const CgSenseOptions& opts, std::vector<double>* residuals) {
  if (!(opts.mu >= 0.0)) throw InvalidParameterError("cg_sense: mu must be >= 0");
  if (opts.iterations < 1) throw InvalidParameterError("cg_sense: iterations must be >= 1");

  DynamicImage r = adjoint(y, op);
  DynamicImage x(r.frames(), r.rows(), r.cols());
  const double b_norm = norm2(r.flat());
  double rr = std::norm(norm2(r.flat()));
  if (residuals) residuals->push_back(std::sqrt(rr));
  if (b_norm == 0.0) return x;

  DynamicImage p = r;
  for (int it = 0; it < opts.iterations; ++it) {
    if (std::sqrt(rr) <= opts.tol * b_norm) break;
    const DynamicImage ap = normal_op(p, op, opts.mu);
    const double curvature = inner_product(p.flat(), ap.flat()).real();
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
      throw NumericError("cg_sense: breakdown, search direction curvature " +
                         std::to_string(curvature));
    }
    const double alpha = rr / curvature;
    auto xf = x.flat();
    auto rf = r.flat();
    auto pf = p.flat();
    auto apf = ap.flat();
    for (std::size_t i = 0; i < xf.size(); ++i) {
      xf[i] += alpha * pf[i];
      rf[i] -= alpha * apf[i];
    }
    const double rr_next = std::norm(norm2(rf));
    if (residuals) residuals->push_back(std::sqrt(rr_next));
    const double beta = rr_next / rr;
    for (std::size_t i = 0; i < pf.size(); ++i) pf[i] = rf[i] + beta * pf[i];
    rr = rr_next;
  }
  return x;
}

}  // namespace cmr
