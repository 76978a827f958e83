#pragma once

#include <complex>

#include "tcpfluid/linearize.hpp"

namespace tcpfluid {

enum class ConditionKind { sufficient, necessary_sufficient, non_oscillatory, delay_independent };

struct StabilityVerdict {
  bool stable = false;  // for non_oscillatory: "converges without ringing"
  double margin = 0.0;  // positive inside the region; units of the compared quantity
  ConditionKind condition = ConditionKind::sufficient;
  // Tangency abscissa ln(b tau)/tau from the non-oscillatory boundary
  // construction; NaN for the other conditions.
  double sigma = 0.0;
};

struct RightmostRoot {
  std::complex<double> lambda;  // 1/seconds
  double residual = 0.0;        // |lambda + a + b e^{-lambda tau}|
};

// b tau < pi/2.  Boundary (margin == 0) counts as not satisfied.
StabilityVerdict sufficient_stable(const ScalarCoefficients& c);

// tau sqrt(b^2 - a^2) < arccos(-a/b); b <= a is reported as delay-independent
// stability with margin a - b.
StabilityVerdict necsuf_stable(const ScalarCoefficients& c);

// First delay at which a conjugate root pair reaches the imaginary axis:
// tau_c = arccos(-a/b) / sqrt(b^2 - a^2).  Requires b > a >= 0.
double hopf_delay(double a, double b);

// ln(b tau) + a tau + 1 < 0; margin is the negated left side.
StabilityVerdict non_oscillatory(const ScalarCoefficients& c);

struct MixedTrafficVerdict {
  StabilityVerdict verdict;     // b tau < pi/2 with the Gaussian-loss b
  double b_tau_generic = 0.0;   // from scalar_coefficients
  double b_tau_closed = 0.0;    // protocol-particularised closed form
};

/// Sufficient stability test under the Gaussian mixed-traffic loss.  The
/// closed-form b*tau is evaluated alongside the generic one and, for
/// plain-variant equilibria (where the closed forms are derived), a relative
/// disagreement above 1e-9 raises NumericError.
MixedTrafficVerdict mixed_traffic_sufficient(const ProtocolSpec& spec,
                                             const GaussianMixedTraffic& g,
                                             const EquilibriumResult& eq);

/// Rightmost characteristic root of lambda + a + b e^{-lambda tau} = 0 via
/// the transform (lambda + a) tau e^{(lambda+a) tau} = -b tau e^{a tau}, i.e.
/// lambda = -a + W0(-b tau e^{a tau}) / tau.
RightmostRoot rightmost_root(const ScalarCoefficients& c);

}  // namespace tcpfluid
