#include "tcpfluid/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace tcpfluid {

double equilibrium_residual(const ProtocolSpec& spec, const LossModel& loss,
                            EquilibriumVariant variant, double w) {
  const LossValue lv = loss_prob(loss, w);
  const double ack = variant == EquilibriumVariant::ack_weighted ? 1.0 - lv.p : 1.0;
  return increase_gain(spec, w) * ack - decrease_gain(spec, w) * lv.p;
}

namespace {

// Analytic residual derivative, used by the Newton polish.
double residual_deriv(const ProtocolSpec& spec, const LossModel& loss,
                      EquilibriumVariant variant, double w) {
  const LossValue lv = loss_prob(loss, w);
  const double pp = loss_prob_deriv(loss, w);
  const double i = increase_gain(spec, w);
  const double di = increase_gain_deriv(spec, w);
  const double d = decrease_gain(spec, w);
  const double dd = decrease_gain_deriv(spec, w);
  if (variant == EquilibriumVariant::ack_weighted)
    return di * (1.0 - lv.p) - i * pp - dd * lv.p - d * pp;
  return di - dd * lv.p - d * pp;
}

}  // namespace

EquilibriumResult solve_equilibrium(const ProtocolSpec& spec, const LossModel& loss,
                                    EquilibriumVariant variant) {
  validate(loss);

  double lo = 1e-6;
  double hi = window_upper_bound(loss);
  if (std::holds_alternative<GaussianMixedTraffic>(loss))
    hi *= 1.0 - 1e-12;  // the Gaussian model is defined on the open interval
  if (spec.kind == ProtocolKind::hstcp) {
    lo = std::max(lo, spec.f1.w_min());
    hi = std::min(hi, spec.f1.w_max());
  }
  if (!(hi > lo)) throw DomainError("no equilibrium in operating range: empty bracket");

  const double rlo = equilibrium_residual(spec, loss, variant, lo);
  const double rhi = equilibrium_residual(spec, loss, variant, hi);
  if (!(rlo > 0.0 && rhi <= 0.0))
    throw DomainError("no equilibrium in operating range: residual has no sign change");

  // Bisection until the bracket's relative width drops below 1e-12.
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double rm = equilibrium_residual(spec, loss, variant, mid);
    if (rm > 0.0)
      lo = mid;
    else
      hi = mid;
  }

  // Newton polish; the bracket is retained as a safeguard.
  double w = 0.5 * (lo + hi);
  for (int it = 0; it < 6; ++it) {
    const double r = equilibrium_residual(spec, loss, variant, w);
    const double dr = residual_deriv(spec, loss, variant, w);
    if (dr == 0.0) break;
    const double next = w - r / dr;
    if (!(next > lo && next < hi)) break;
    if (next == w) break;
    w = next;
  }

  const LossValue lv = loss_prob(loss, w);
  EquilibriumResult res;
  res.w_star = w;
  res.p_star = lv.p;
  res.x_star = w / loss_rtt(loss);
  res.residual = equilibrium_residual(spec, loss, variant, w);
  res.variant = variant;
  res.overload = lv.overload;

  const double scale = std::max(increase_gain(spec, w), decrease_gain(spec, w) * lv.p);
  if (!(std::abs(res.residual) <= 1e-10 * scale))
    throw NumericError("equilibrium residual exceeds contract");
  return res;
}

}  // namespace tcpfluid
