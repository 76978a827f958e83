#pragma once

#include <optional>
#include <vector>

#include "tcpfluid/multibottleneck_types.hpp"
#include "tcpfluid/scalar_stability.hpp"

namespace tcpfluid {

struct MultiEquilibrium {
  double w1 = 0.0, w2 = 0.0;          // packets
  double residual1 = 0.0, residual2 = 0.0;
};

/// Equilibrium of the two-flow model: alternating per-coordinate bisection to
/// near-convergence, then damped two-dimensional Newton.  Exactly symmetric
/// topologies are solved through the scalar reduction so both coordinates
/// come out identical.
MultiEquilibrium multi_equilibrium(const MultiTopology& top);

/// Linearisation coefficients of the two-flow model,
///   u1' = -M1 u1(t) - N1 u1(t-tau1) - P1 u2(t-tau2),
///   u2' = -M2 u2(t) - N2 u2(t-tau2) - P2 u1(t-tau1).
struct MultiCoefficients {
  double M1 = 0.0, M2 = 0.0;  // 1/seconds
  double N1 = 0.0, N2 = 0.0;
  double P1 = 0.0, P2 = 0.0;

  // Holds for valid Compound inputs with k < 2.
  bool all_positive() const {
    return M1 > 0.0 && M2 > 0.0 && N1 > 0.0 && N2 > 0.0 && P1 > 0.0 && P2 > 0.0;
  }
};

MultiCoefficients multi_coefficients(const MultiTopology& top, double w1, double w2);

/// Coefficients of the symmetric reduction
/// (lambda + a + b e^{-lambda tau})^2 - c^2 e^{-2 lambda tau} = 0.
struct CaseICoefficients {
  double a = 0.0, b = 0.0, c = 0.0;  // 1/seconds
  double tau = 0.0;                  // seconds
};

// Symmetric topologies only (equal buffers, capacities and delays).
CaseICoefficients case1_reduce(const MultiTopology& top);

struct CaseIAnalysis {
  std::optional<double> omega1;  // sqrt((b+c)^2 - a^2), exists iff b+c > a
  std::optional<double> omega2;  // sqrt((b-c)^2 - a^2), exists iff b-c > a
  std::optional<double> tau1c;   // arccos(-a/(b+c)) / omega1
  std::optional<double> tau2c;   // arccos(-a/(b-c)) / omega2
  std::optional<double> tau_c;   // min of the existing critical delays
  bool delay_independent = false;  // b+c <= a: stable for every delay
  double margin = 0.0;             // arccos(-a/(b+c)) - tau * omega1 (angle units)
  bool stable = false;             // tau < tau_c (or delay-independent)
};

CaseIAnalysis case1_analyze(const CaseICoefficients& cc);

/// Closed-form stability margin for Compound at the symmetric equilibrium:
///   arccos((k-2)(1-2p)/B) - alpha w*^{k-1} sqrt(B^2 - (k-2)^2 (1-2p)^2)
/// (extended variant; the appendix variant replaces (1-2p) by 1).  Equals the
/// case1_analyze margin at matching inputs.
double case1_compound_condition(double alpha, double k, double B, double w_star, double p_star,
                                CoeffVariant variant);

/// Coefficients of lambda^2 + a lambda + b lambda e^{-lambda tau1}
///                + c e^{-lambda tau1} + d = 0.
struct QuadCoefficients {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double tau1 = 0.0;
  bool d_positive = true;
};

/// Builds the quadratic-exponential reduction for the short-second-delay
/// regime.  The second round trip time is regularised to
/// epsilon_factor * tau1 (the limit makes N2 unbounded); the relative change
/// of (a,b,c,d) when epsilon is halved is reported as eps_sensitivity.
struct Case2Reduction {
  QuadCoefficients qc;
  MultiCoefficients mc;
  double w1 = 0.0, w2 = 0.0;
  double eps_sensitivity = 0.0;
};

Case2Reduction case2_reduce(const MultiTopology& top, double epsilon_factor = 1e-3);

enum class Case2Class { condition1, condition2, stable_all_tau };

const char* to_string(Case2Class c);

struct CaseIIAnalysis {
  std::vector<double> omega_sq;        // positive roots of the omega^2 quadratic
  Case2Class classification = Case2Class::stable_all_tau;
  std::optional<double> omega;         // crossing frequency (condition1)
  std::optional<double> tau1c;         // first crossing delay (condition1)
  std::vector<double> crossing_delays; // first crossing delay per omega root
  bool switches_possible = false;      // condition2: restabilisation not ruled out
  bool stable = false;                 // verdict at qc.tau1, up to the first crossing
};

/// Requires the zero-delay system to be stable (a+b > 0 and c+d > 0 by the
/// quadratic's Routh-Hurwitz test); otherwise throws DomainError
/// ("unstable at zero delay").
CaseIIAnalysis case2_analyze(const QuadCoefficients& qc);

/// Re(d lambda / d kappa) at the symmetric-case crossing, evaluated from the
/// closed form omega1^2 tau0 / (kappa_c ((1 + kappa_c a tau0)^2 + (omega1 tau0)^2));
/// strictly positive for every valid input.
double transversality_case1(double a, double b, double c, double tau0, double kappa_c);

struct Case2Transversality {
  double term3_real = 0.0;        // Re of the third term of (d lambda/d kappa)^{-1}
  bool total_sign_positive = false;  // declared when term3_real > 0 (term 2 = kappa tau1 > 0)
  double combo = 0.0;             // abc - c^2 - b^2 d (enters term3_real's numerator)
  double combo_alt = 0.0;         // abc - c^2 - b d^2, kept as a labelled comparison value
  bool d_positive = true;
  bool precondition_violated = false;  // set when d <= 0
};

Case2Transversality transversality_case2(const QuadCoefficients& qc, double omega, double kappa,
                                         double tau1);

/// Rightmost characteristic root by Newton from a rectangular seed grid
/// (Re in [-5 s, s], Im in [0, 10 s], s = max coefficient magnitude),
/// deduplicated, maximal real part returned.
RightmostRoot quasi_poly_rightmost(const CaseICoefficients& cc);
RightmostRoot quasi_poly_rightmost(const QuadCoefficients& qc);

}  // namespace tcpfluid
