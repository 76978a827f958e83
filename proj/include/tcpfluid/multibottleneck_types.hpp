#pragma once

#include "tcpfluid/protocols.hpp"

namespace tcpfluid {

// Two published coefficient sets for the two-edge-router model disagree on
// the loss-complement factor and on the shared-router capacity entering the
// core loss term (2C vs C); both are kept selectable.  `extended` is the
// default, `appendix` the plain-gain variant with core capacity C.
enum class CoeffVariant { extended, appendix };

/// Two sets of flows behind edge routers (buffers B1, B2; per-flow capacities
/// C1, C2; round trip times tau1, tau2) sharing a core router (buffer B,
/// per-flow capacity C).
struct MultiTopology {
  double B1 = 0.0, B2 = 0.0, B = 0.0;  // packets
  double C1 = 0.0, C2 = 0.0, C = 0.0;  // packets/second
  double tau1 = 0.0, tau2 = 0.0;       // seconds
  ProtocolSpec spec;                   // appendix variant requires Compound
  CoeffVariant coeff_variant = CoeffVariant::extended;
};

void validate(const MultiTopology& top);

// Edge loss p_j(w_j) = (w_j/(C_j tau_j))^{B_j} and core loss
// q(w1, w2) = ((w1/tau1 + w2/tau2)/Ctilde)^B with Ctilde = 2C (extended) or C
// (appendix); both saturated at 1.
double edge_loss(const MultiTopology& top, int j, double w);
double core_loss(const MultiTopology& top, double w1, double w2);

// Drift of flow j's window given its own current window and the two delayed
// windows; this is the right-hand side used by both the equilibrium solver
// and the pair simulator.
double pair_drift(const MultiTopology& top, int j, double w_now, double w1_delayed,
                  double w2_delayed);

}  // namespace tcpfluid
