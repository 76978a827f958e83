#pragma once

#include "tcpfluid/loss_models.hpp"
#include "tcpfluid/protocols.hpp"

namespace tcpfluid {

// Two forms of the window drift are in circulation: one where the per-ACK
// increase acts on every packet and one where it is weighted by the delivery
// probability (1 - p).  Both are kept behind a flag so the discrepancy stays
// testable; plain is the default.
enum class EquilibriumVariant { plain, ack_weighted };

struct EquilibriumResult {
  double w_star = 0.0;    // packets
  double p_star = 0.0;    // loss probability at w_star
  double x_star = 0.0;    // w_star / tau, packets/second
  double residual = 0.0;  // i(w*)(1 - [ack] p) - d(w*) p at the returned root
  EquilibriumVariant variant = EquilibriumVariant::plain;
  bool overload = false;  // loss model saturated at the root (propagated flag)
};

// Equilibrium residual i(w)(1 - [ack_weighted] p(w)) - d(w) p(w).
double equilibrium_residual(const ProtocolSpec& spec, const LossModel& loss,
                            EquilibriumVariant variant, double w);

/// Solves for the nontrivial equilibrium window w* by bracketing bisection on
/// (1e-6, w_max] followed by a Newton polish.  Throws DomainError when the
/// bracket holds no sign change ("no equilibrium in operating range").
EquilibriumResult solve_equilibrium(const ProtocolSpec& spec, const LossModel& loss,
                                    EquilibriumVariant variant = EquilibriumVariant::plain);

}  // namespace tcpfluid
