#include "tcpfluid/multibottleneck_types.hpp"

#include <cmath>

#include "tcpfluid/errors.hpp"

namespace tcpfluid {

void validate(const MultiTopology& top) {
  if (!(top.B1 >= 1.0 && top.B2 >= 1.0 && top.B >= 1.0))
    throw DomainError("topology: buffers must be >= 1");
  if (!(top.C1 > 0.0 && top.C2 > 0.0 && top.C > 0.0))
    throw DomainError("topology: capacities must be > 0");
  if (!(top.tau1 > 0.0 && top.tau2 > 0.0))
    throw DomainError("topology: round trip times must be > 0");
  if (top.coeff_variant == CoeffVariant::appendix && top.spec.kind != ProtocolKind::compound)
    throw DomainError("topology: appendix coefficient variant requires a Compound spec");
}

double edge_loss(const MultiTopology& top, int j, double w) {
  const double cap = (j == 1 ? top.C1 * top.tau1 : top.C2 * top.tau2);
  const double buf = (j == 1 ? top.B1 : top.B2);
  const double util = w / cap;
  return util >= 1.0 ? 1.0 : std::pow(util, buf);
}

double core_loss(const MultiTopology& top, double w1, double w2) {
  const double ctilde = top.coeff_variant == CoeffVariant::extended ? 2.0 * top.C : top.C;
  const double util = (w1 / top.tau1 + w2 / top.tau2) / ctilde;
  return util >= 1.0 ? 1.0 : std::pow(util, top.B);
}

double pair_drift(const MultiTopology& top, int j, double w_now, double w1_delayed,
                  double w2_delayed) {
  const double own_delayed = (j == 1 ? w1_delayed : w2_delayed);
  const double tau = (j == 1 ? top.tau1 : top.tau2);
  const double p = edge_loss(top, j, own_delayed);
  const double q = core_loss(top, w1_delayed, w2_delayed);
  const double total = std::min(p + q, 1.0);
  const double i = increase_gain(top.spec, w_now);
  const double d = decrease_gain(top.spec, w_now);
  const double ack = top.coeff_variant == CoeffVariant::extended ? 1.0 - total : 1.0;
  return (i * ack - d * total) * own_delayed / tau;
}

}  // namespace tcpfluid
