#include "tcpfluid/linearize.hpp"

#include <cmath>

namespace tcpfluid {

ScalarCoefficients scalar_coefficients(const ProtocolSpec& spec, const LossModel& loss,
                                       const EquilibriumResult& eq) {
  const double w = eq.w_star;
  const double tau = loss_rtt(loss);
  const double p = eq.p_star;
  const double pp = loss_prob_deriv(loss, w);
  const double ack = eq.variant == EquilibriumVariant::ack_weighted ? 1.0 - p : 1.0;

  ScalarCoefficients c;
  c.tau = tau;
  c.a = -(w / tau) * (increase_gain_deriv(spec, w) * ack - decrease_gain_deriv(spec, w) * p);
  c.b = (w / tau) * pp * decrease_gain(spec, w);
  c.a_negative = c.a < 0.0;
  return c;
}

ScalarCoefficients compound_ab(double alpha, double k, double B, double w_star, double tau) {
  ScalarCoefficients c;
  c.tau = tau;
  const double g = alpha * std::pow(w_star, k - 1.0);
  c.a = g * (2.0 - k) / tau;
  c.b = g * B / tau;
  return c;
}

ScalarCoefficients reno_ab(double B, double w_star, double tau) {
  ScalarCoefficients c;
  c.tau = tau;
  c.a = 2.0 / (w_star * tau);
  c.b = B / (w_star * tau);
  return c;
}

ScalarCoefficients hstcp_ab(const ProtocolSpec& spec, double B, double p_star, double w_star,
                            double tau) {
  if (spec.kind != ProtocolKind::hstcp) throw DomainError("hstcp_ab: spec is not hstcp");
  const double f1 = spec.f1.value(w_star);
  const double f1p = spec.f1.derivative(w_star);
  const double f2 = spec.f2.value(w_star);
  const double f2p = spec.f2.derivative(w_star);
  ScalarCoefficients c;
  c.tau = tau;
  c.a = (f1 / w_star - f1p + f2p * w_star * w_star * p_star + f2 * w_star * p_star) / tau;
  c.b = B * p_star * f2 * w_star / tau;
  c.a_negative = c.a < 0.0;
  return c;
}

double hstcp_bracket(const ProtocolSpec& spec, double p_star, double w_star) {
  const double f1 = spec.f1.value(w_star);
  return w_star * spec.f1.derivative(w_star) / f1 - 2.0 -
         spec.f2.derivative(w_star) * std::pow(w_star, 3.0) * p_star / f1;
}

double hstcp_bracket_alt(const ProtocolSpec& spec, double p_star, double w_star) {
  const double f1 = spec.f1.value(w_star);
  return w_star * spec.f1.derivative(w_star) / f1 - 2.0 -
         spec.f2.derivative(w_star) * w_star * w_star * p_star / f1;
}

}  // namespace tcpfluid
