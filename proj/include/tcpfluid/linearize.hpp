#pragma once

#include "tcpfluid/equilibrium.hpp"

namespace tcpfluid {

/// Coefficients of the linearised window dynamics u'(t) = -a u(t) - b u(t-tau)
/// about the equilibrium.
struct ScalarCoefficients {
  double a = 0.0;    // 1/seconds
  double b = 0.0;    // 1/seconds
  double tau = 0.0;  // seconds
  // a < 0 falls outside the precondition of the stability conditions; the
  // verdict functions reject it, so it is surfaced here rather than asserted.
  bool a_negative = false;
};

// Generic path: a = -(w*/tau)(i'(w*) [ (1-p*) if ack_weighted ] - d'(w*) p*),
// b = (w*/tau) p'(w*) d(w*).
ScalarCoefficients scalar_coefficients(const ProtocolSpec& spec, const LossModel& loss,
                                       const EquilibriumResult& eq);

// Closed-form coefficient oracles for the Drop-Tail power-law loss at the
// plain-variant equilibrium.  They satisfy -a/b = (k-2)/B (Compound), -2/B
// (Reno), bracket/B (HSTCP) and are cross-checked against the generic path.
ScalarCoefficients compound_ab(double alpha, double k, double B, double w_star, double tau);
ScalarCoefficients reno_ab(double B, double w_star, double tau);
ScalarCoefficients hstcp_ab(const ProtocolSpec& spec, double B, double p_star, double w_star,
                            double tau);

// HSTCP grouping  w f1'/f1 - 2 - f2' w^3 p / f1  appearing in the closed-form
// conditions; satisfies -a/b = bracket/B at the plain equilibrium.
double hstcp_bracket(const ProtocolSpec& spec, double p_star, double w_star);
// Variant of the same grouping with a w^2 factor on the f2' term.  It does not
// reduce to the generic path when f2' != 0; kept only as a labelled
// comparison value.
double hstcp_bracket_alt(const ProtocolSpec& spec, double p_star, double w_star);

}  // namespace tcpfluid
