#include "tcpfluid/scalar_stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tcpfluid/lambert_w.hpp"

namespace tcpfluid {

namespace {

void check_preconditions(const ScalarCoefficients& c) {
  if (!(c.a >= 0.0)) throw DomainError("stability verdict requires a >= 0");
  if (!(c.b > 0.0)) throw DomainError("stability verdict requires b > 0");
  if (!(c.tau > 0.0)) throw DomainError("stability verdict requires tau > 0");
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

StabilityVerdict sufficient_stable(const ScalarCoefficients& c) {
  check_preconditions(c);
  StabilityVerdict v;
  v.condition = ConditionKind::sufficient;
  v.margin = std::numbers::pi / 2.0 - c.b * c.tau;
  v.stable = v.margin > 0.0;
  v.sigma = kNaN;
  return v;
}

StabilityVerdict necsuf_stable(const ScalarCoefficients& c) {
  check_preconditions(c);
  StabilityVerdict v;
  v.sigma = kNaN;
  if (c.b <= c.a) {
    // |lambda + a| >= a >= b >= |b e^{-lambda tau}| on Re lambda >= 0, so no
    // root can reach the closed right half plane for any delay.
    v.condition = ConditionKind::delay_independent;
    v.margin = c.a - c.b;
    v.stable = true;
    return v;
  }
  v.condition = ConditionKind::necessary_sufficient;
  v.margin = std::acos(-c.a / c.b) - c.tau * std::sqrt(c.b * c.b - c.a * c.a);
  v.stable = v.margin > 0.0;
  return v;
}

double hopf_delay(double a, double b) {
  if (!(a >= 0.0)) throw DomainError("hopf_delay requires a >= 0");
  if (!(b > a)) throw DomainError("no finite Hopf delay: requires b > a");
  return std::acos(-a / b) / std::sqrt(b * b - a * a);
}

StabilityVerdict non_oscillatory(const ScalarCoefficients& c) {
  check_preconditions(c);
  StabilityVerdict v;
  v.condition = ConditionKind::non_oscillatory;
  v.margin = -(std::log(c.b * c.tau) + c.a * c.tau + 1.0);
  v.stable = v.margin > 0.0;
  v.sigma = std::log(c.b * c.tau) / c.tau;
  return v;
}

MixedTrafficVerdict mixed_traffic_sufficient(const ProtocolSpec& spec,
                                             const GaussianMixedTraffic& g,
                                             const EquilibriumResult& eq) {
  const LossModel loss = g;
  const ScalarCoefficients c = scalar_coefficients(spec, loss, eq);

  const double w = eq.w_star;
  const double denom = w * g.sigma1_sq + g.v * g.sigma2_sq * g.rtt_s;
  const double load = g.v * g.sigma2_sq + (g.capacity_per_flow - g.v) * g.sigma1_sq;
  const double common = 2.0 * g.buffer_pkts * g.rtt_s * load / (denom * denom);
  double closed = 0.0;
  switch (spec.kind) {
    case ProtocolKind::compound: closed = common * spec.alpha * std::pow(w, spec.k); break;
    case ProtocolKind::reno: closed = common; break;
    case ProtocolKind::hstcp: closed = common * spec.f1.value(w); break;
  }

  MixedTrafficVerdict out;
  out.b_tau_generic = c.b * c.tau;
  out.b_tau_closed = closed;
  out.verdict = sufficient_stable(c);
  if (eq.variant == EquilibriumVariant::plain &&
      std::abs(out.b_tau_generic - closed) > 1e-9 * std::abs(closed))
    throw NumericError("mixed-traffic closed form disagrees with the generic b*tau");
  return out;
}

RightmostRoot rightmost_root(const ScalarCoefficients& c) {
  if (c.b == 0.0) throw DomainError("rightmost_root requires b != 0");
  if (!(c.tau > 0.0)) throw DomainError("rightmost_root requires tau > 0");
  const double arg_scale = c.b * c.tau * std::exp(c.a * c.tau);
  if (!std::isfinite(arg_scale)) throw NumericError("rightmost_root: transform argument overflowed");

  std::complex<double> lambda = -c.a + lambert_w0({-arg_scale, 0.0}) / c.tau;

  // Newton clean-up directly on the characteristic function.
  for (int it = 0; it < 4; ++it) {
    const std::complex<double> e = c.b * std::exp(-lambda * c.tau);
    const std::complex<double> f = lambda + c.a + e;
    const std::complex<double> df = 1.0 - c.tau * e;
    if (df == std::complex<double>(0.0, 0.0)) break;
    lambda -= f / df;
  }
  if (lambda.imag() < 0.0) lambda = std::conj(lambda);  // report the upper root of the pair

  RightmostRoot r;
  r.lambda = lambda;
  r.residual = std::abs(lambda + c.a + c.b * std::exp(-lambda * c.tau));
  if (!(r.residual <= 1e-10 * std::max(1.0, c.b)))
    throw NumericError("rightmost_root: residual exceeds contract");
  return r;
}

}  // namespace tcpfluid
