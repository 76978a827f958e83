#include "tcpfluid/multibottleneck.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <tuple>

namespace tcpfluid {

namespace {

struct LossState {
  double p1, p2, q;      // component losses at (w1, w2)
  double total1, total2; // p_j + q, saturated at 1
};

LossState losses(const MultiTopology& top, double w1, double w2) {
  LossState s{};
  s.p1 = edge_loss(top, 1, w1);
  s.p2 = edge_loss(top, 2, w2);
  s.q = core_loss(top, w1, w2);
  s.total1 = std::min(s.p1 + s.q, 1.0);
  s.total2 = std::min(s.p2 + s.q, 1.0);
  return s;
}

// Bracket residual of flow j at a candidate equilibrium (w1, w2):
// i(w_j) [1 - p_j - q]_ext - d(w_j)(p_j + q).
double resid(const MultiTopology& top, int j, double w1, double w2) {
  const LossState s = losses(top, w1, w2);
  const double w = (j == 1 ? w1 : w2);
  const double tot = (j == 1 ? s.total1 : s.total2);
  const double ack = top.coeff_variant == CoeffVariant::extended ? 1.0 - tot : 1.0;
  return increase_gain(top.spec, w) * ack - decrease_gain(top.spec, w) * tot;
}

double resid_scale(const MultiTopology& top, int j, double w1, double w2) {
  const LossState s = losses(top, w1, w2);
  const double w = (j == 1 ? w1 : w2);
  const double tot = (j == 1 ? s.total1 : s.total2);
  return std::max(increase_gain(top.spec, w), decrease_gain(top.spec, w) * tot);
}

// Solves resid_j = 0 in w_j with the other window held fixed.
double coordinate_root(const MultiTopology& top, int j, double other) {
  const double cap = (j == 1 ? top.C1 * top.tau1 : top.C2 * top.tau2);
  double lo = 1e-9 * cap, hi = cap * (1.0 - 1e-15);
  auto eval = [&](double w) {
    return j == 1 ? resid(top, 1, w, other) : resid(top, 2, other, w);
  };
  if (!(eval(lo) > 0.0 && eval(hi) <= 0.0))
    throw NumericError("multi_equilibrium: coordinate bracket lost its sign change");
  for (int it = 0; it < 110; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool symmetric(const MultiTopology& top) {
  return top.B1 == top.B2 && top.B1 == top.B && top.C1 == top.C2 && top.C1 == top.C &&
         top.tau1 == top.tau2;
}

}  // namespace

MultiEquilibrium multi_equilibrium(const MultiTopology& top) {
  validate(top);

  MultiEquilibrium eq;
  if (symmetric(top)) {
    // Identical flows admit the symmetric equilibrium; solving one coordinate
    // on the diagonal keeps w1 == w2 exact.
    const double cap = top.C * top.tau1;
    double lo = 1e-9 * cap, hi = cap * (1.0 - 1e-15);
    auto eval = [&](double w) { return resid(top, 1, w, w); };
    if (!(eval(lo) > 0.0 && eval(hi) <= 0.0))
      throw NumericError("multi_equilibrium: no sign change on the diagonal");
    for (int it = 0; it < 110; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (eval(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    eq.w1 = eq.w2 = 0.5 * (lo + hi);
  } else {
    // Alternating per-coordinate bisection; the map is monotone, so this
    // settles geometrically and leaves Newton a short, safe polish.
    double w1 = 0.5 * top.C1 * top.tau1;
    double w2 = 0.5 * top.C2 * top.tau2;
    for (int sweep = 0; sweep < 200; ++sweep) {
      const double n1 = coordinate_root(top, 1, w2);
      const double n2 = coordinate_root(top, 2, n1);
      const double move = std::abs(n1 - w1) / n1 + std::abs(n2 - w2) / n2;
      w1 = n1;
      w2 = n2;
      if (move < 1e-13) break;
      if (sweep == 199) throw NumericError("multi_equilibrium: no convergence in 200 sweeps");
    }
    // Damped Newton on the residual pair with centered-difference partials.
    for (int it = 0; it < 20; ++it) {
      const double r1 = resid(top, 1, w1, w2);
      const double r2 = resid(top, 2, w1, w2);
      const double h1 = 1e-7 * w1, h2 = 1e-7 * w2;
      const double j11 = (resid(top, 1, w1 + h1, w2) - resid(top, 1, w1 - h1, w2)) / (2 * h1);
      const double j12 = (resid(top, 1, w1, w2 + h2) - resid(top, 1, w1, w2 - h2)) / (2 * h2);
      const double j21 = (resid(top, 2, w1 + h1, w2) - resid(top, 2, w1 - h1, w2)) / (2 * h1);
      const double j22 = (resid(top, 2, w1, w2 + h2) - resid(top, 2, w1, w2 - h2)) / (2 * h2);
      const double det = j11 * j22 - j12 * j21;
      if (det == 0.0) break;
      double dw1 = -(r1 * j22 - r2 * j12) / det;
      double dw2 = -(j11 * r2 - j21 * r1) / det;
      double damp = 1.0;
      while (damp > 1e-4 && (w1 + damp * dw1 <= 0.0 || w2 + damp * dw2 <= 0.0)) damp *= 0.5;
      w1 += damp * dw1;
      w2 += damp * dw2;
      if (std::abs(dw1) < 1e-14 * w1 && std::abs(dw2) < 1e-14 * w2) break;
    }
    eq.w1 = w1;
    eq.w2 = w2;
  }

  eq.residual1 = resid(top, 1, eq.w1, eq.w2);
  eq.residual2 = resid(top, 2, eq.w1, eq.w2);
  if (std::abs(eq.residual1) > 1e-10 * resid_scale(top, 1, eq.w1, eq.w2) ||
      std::abs(eq.residual2) > 1e-10 * resid_scale(top, 2, eq.w1, eq.w2))
    throw NumericError("multi_equilibrium: residual exceeds contract");
  return eq;
}

MultiCoefficients multi_coefficients(const MultiTopology& top, double w1, double w2) {
  validate(top);
  const LossState s = losses(top, w1, w2);
  const bool ext = top.coeff_variant == CoeffVariant::extended;
  const double S = w1 / top.tau1 + w2 / top.tau2;  // aggregate core arrival rate

  auto coeffs_for = [&](int j) {
    const double w = (j == 1 ? w1 : w2);
    const double tau = (j == 1 ? top.tau1 : top.tau2);
    const double tau_other = (j == 1 ? top.tau2 : top.tau1);
    const double bj = (j == 1 ? top.B1 : top.B2);
    const double pj = (j == 1 ? s.p1 : s.p2);
    const double tot = (j == 1 ? s.total1 : s.total2);
    const double i = increase_gain(top.spec, w);
    const double di = increase_gain_deriv(top.spec, w);
    const double d = decrease_gain(top.spec, w);
    const double dd = decrease_gain_deriv(top.spec, w);
    const double ppj = bj * pj / w;             // d p_j / d w_j at the delayed argument
    const double qw_own = top.B * s.q / (S * tau);        // d q / d w_j(t - tau_j)
    const double qw_other = top.B * s.q / (S * tau_other);
    const double ack = ext ? 1.0 - tot : 1.0;
    // Sensitivity of the loss bracket to the delayed windows; the increase
    // term contributes only in the extended variant.
    const double gain = ext ? i + d : d;
    struct {
      double M, N, P;
    } r{};
    r.M = -(w / tau) * (di * ack - dd * tot);
    r.N = (w / tau) * gain * (ppj + qw_own);
    r.P = (w / tau) * gain * qw_other;
    return r;
  };

  const auto c1 = coeffs_for(1);
  const auto c2 = coeffs_for(2);
  MultiCoefficients mc;
  mc.M1 = c1.M;
  mc.M2 = c2.M;
  mc.N1 = c1.N;
  mc.N2 = c2.N;
  mc.P1 = c1.P;
  mc.P2 = c2.P;
  for (double v : {mc.M1, mc.M2, mc.N1, mc.N2, mc.P1, mc.P2})
    if (!std::isfinite(v)) throw NumericError("multi_coefficients: non-finite coefficient");
  return mc;
}

CaseICoefficients case1_reduce(const MultiTopology& top) {
  validate(top);
  if (!(top.B1 == top.B2 && top.B1 == top.B && top.C1 == top.C2 && top.C1 == top.C &&
        top.tau1 == top.tau2))
    throw DomainError("case1_reduce: topology must be fully symmetric");
  const MultiEquilibrium eq = multi_equilibrium(top);
  const MultiCoefficients mc = multi_coefficients(top, eq.w1, eq.w2);
  CaseICoefficients cc;
  cc.a = mc.M1;
  cc.b = mc.N1;
  cc.c = mc.P1;
  cc.tau = top.tau1;
  return cc;
}

CaseIAnalysis case1_analyze(const CaseICoefficients& cc) {
  // c = 0 is the degenerate reduction where both factors coincide.
  if (!(cc.a > 0.0 && cc.b > 0.0 && cc.c >= 0.0))
    throw DomainError("case1_analyze: coefficients must be positive");
  if (!(cc.b > cc.c)) throw DomainError("case1_analyze: requires b > c");
  if (!(cc.tau > 0.0)) throw DomainError("case1_analyze: requires tau > 0");

  CaseIAnalysis out;
  if (cc.b + cc.c <= cc.a) {
    out.delay_independent = true;
    out.stable = true;
    out.margin = cc.a - (cc.b + cc.c);
    return out;
  }
  const double w1 = std::sqrt((cc.b + cc.c) * (cc.b + cc.c) - cc.a * cc.a);
  out.omega1 = w1;
  out.tau1c = std::acos(-cc.a / (cc.b + cc.c)) / w1;
  if (cc.b - cc.c > cc.a) {
    const double w2 = std::sqrt((cc.b - cc.c) * (cc.b - cc.c) - cc.a * cc.a);
    out.omega2 = w2;
    out.tau2c = std::acos(-cc.a / (cc.b - cc.c)) / w2;
  }
  out.tau_c = out.tau2c ? std::min(*out.tau1c, *out.tau2c) : *out.tau1c;
  out.margin = std::acos(-cc.a / (cc.b + cc.c)) - cc.tau * w1;
  out.stable = cc.tau < *out.tau_c;
  return out;
}

double case1_compound_condition(double alpha, double k, double B, double w_star, double p_star,
                                CoeffVariant variant) {
  const double shade = variant == CoeffVariant::extended ? 1.0 - 2.0 * p_star : 1.0;
  const double x = (k - 2.0) * shade;
  if (std::abs(x) >= B) return std::numeric_limits<double>::infinity();  // no crossover frequency
  return std::acos(x / B) - alpha * std::pow(w_star, k - 1.0) * std::sqrt(B * B - x * x);
}

Case2Reduction case2_reduce(const MultiTopology& top, double epsilon_factor) {
  validate(top);
  if (!(epsilon_factor > 0.0 && epsilon_factor < 1.0))
    throw DomainError("case2_reduce: epsilon_factor must be in (0,1)");

  auto build = [&](double eps) {
    MultiTopology t = top;
    t.tau2 = eps * top.tau1;
    const MultiEquilibrium eq = multi_equilibrium(t);
    const MultiCoefficients mc = multi_coefficients(t, eq.w1, eq.w2);
    QuadCoefficients qc;
    qc.a = mc.M1 + mc.M2 + mc.N2;
    qc.b = mc.N2;
    qc.c = mc.M1 * (mc.M2 + mc.N2);
    qc.d = mc.N1 * (mc.M2 + mc.N2) - mc.P1 * mc.P2;
    qc.tau1 = top.tau1;
    qc.d_positive = qc.d > 0.0;
    return std::tuple{qc, mc, eq};
  };

  auto [qc, mc, eq] = build(epsilon_factor);
  auto [qc_half, mc_half, eq_half] = build(0.5 * epsilon_factor);

  Case2Reduction red;
  red.qc = qc;
  red.mc = mc;
  red.w1 = eq.w1;
  red.w2 = eq.w2;
  const double rel = std::max(
      {std::abs(qc.a - qc_half.a) / std::abs(qc.a), std::abs(qc.b - qc_half.b) / std::abs(qc.b),
       std::abs(qc.c - qc_half.c) / std::abs(qc.c), std::abs(qc.d - qc_half.d) / std::abs(qc.d)});
  red.eps_sensitivity = rel;
  return red;
}

const char* to_string(Case2Class c) {
  switch (c) {
    case Case2Class::condition1: return "condition1";
    case Case2Class::condition2: return "condition2";
    case Case2Class::stable_all_tau: return "stable_all_tau";
  }
  return "?";
}

namespace {

// First delay at which lambda = i*omega solves the quadratic-exponential
// characteristic equation; reduces to arccos(...)/omega when the matching
// sine is nonnegative.
double first_crossing_delay(const QuadCoefficients& qc, double omega) {
  const double denom = qc.b * qc.b * omega * omega + qc.c * qc.c;
  const double cosv = (omega * omega * (qc.c - qc.a * qc.b) - qc.c * qc.d) / denom;
  const double sinv = omega * (qc.b * (omega * omega - qc.d) + qc.a * qc.c) / denom;
  double theta = std::atan2(sinv, cosv);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return theta / omega;
}

}  // namespace

CaseIIAnalysis case2_analyze(const QuadCoefficients& qc) {
  if (!(qc.tau1 > 0.0)) throw DomainError("case2_analyze: requires tau1 > 0");
  if (!(qc.a + qc.b > 0.0 && qc.c + qc.d > 0.0)) throw DomainError("unstable at zero delay");

  CaseIIAnalysis out;
  // omega^2 solves X^2 - p X + q = 0 with p = 2d - a^2 + b^2, q = d^2 - c^2.
  const double p = 2.0 * qc.d - qc.a * qc.a + qc.b * qc.b;
  const double q = qc.d * qc.d - qc.c * qc.c;
  const double disc = p * p - 4.0 * q;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    if (0.5 * (p + root) > 0.0) out.omega_sq.push_back(0.5 * (p + root));
    // A double root counts once (exactly one positive omega^2).
    if (root > 0.0 && 0.5 * (p - root) > 0.0) out.omega_sq.push_back(0.5 * (p - root));
  }

  if (out.omega_sq.empty()) {
    out.classification = Case2Class::stable_all_tau;
    out.stable = true;
    return out;
  }
  out.classification = out.omega_sq.size() == 1 ? Case2Class::condition1 : Case2Class::condition2;
  for (double x : out.omega_sq) out.crossing_delays.push_back(first_crossing_delay(qc, std::sqrt(x)));
  const double first = *std::min_element(out.crossing_delays.begin(), out.crossing_delays.end());
  if (out.classification == Case2Class::condition1) {
    out.omega = std::sqrt(out.omega_sq.front());
    out.tau1c = first;
  } else {
    out.switches_possible = true;
    out.tau1c = first;
  }
  out.stable = qc.tau1 < first;
  return out;
}

double transversality_case1(double a, double b, double c, double tau0, double kappa_c) {
  if (!(kappa_c > 0.0)) throw DomainError("transversality_case1: kappa_c must be > 0");
  if (!(b + c > a)) throw DomainError("transversality_case1: no crossover frequency");
  const double w1sq = (b + c) * (b + c) - a * a;
  const double t = 1.0 + kappa_c * a * tau0;
  return w1sq * tau0 / (kappa_c * (t * t + w1sq * tau0 * tau0));
}

Case2Transversality transversality_case2(const QuadCoefficients& qc, double omega, double kappa,
                                         double tau1) {
  if (!(omega > 0.0)) throw DomainError("transversality_case2: omega must be > 0");
  Case2Transversality out;
  out.d_positive = qc.d > 0.0;
  out.precondition_violated = !out.d_positive;
  const double a = qc.a, b = qc.b, c = qc.c, d = qc.d;
  out.combo = a * b * c - c * c - b * b * d;
  out.combo_alt = a * b * c - c * c - b * d * d;
  const double w2 = omega * omega;
  const double num =
      2.0 * w2 * kappa * kappa * kappa * tau1 * out.combo * (w2 + kappa * kappa * d);
  const double inner = kappa * kappa * a * c - w2 * b - kappa * kappa * b * d;
  const double den = 4.0 * w2 * w2 * kappa * kappa * c * c + w2 * inner * inner;
  out.term3_real = num / den;
  out.total_sign_positive = out.term3_real > 0.0;
  return out;
}

namespace {

using cplx = std::complex<double>;

RightmostRoot grid_newton(const std::function<cplx(cplx)>& h, const std::function<cplx(cplx)>& hp,
                          double scale, double residual_scale) {
  const int n_re = 41, n_im = 31;
  const double re_lo = -5.0 * scale, re_hi = scale;
  const double im_hi = 10.0 * scale;

  bool found = false;
  cplx best;
  for (int i = 0; i < n_re; ++i) {
    for (int j = 0; j < n_im; ++j) {
      cplx z(re_lo + (re_hi - re_lo) * i / (n_re - 1), im_hi * j / (n_im - 1));
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const cplx f = h(z);
        const cplx df = hp(z);
        if (df == cplx(0.0, 0.0)) break;
        const cplx step = f / df;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) {
          ok = std::abs(h(z)) <= residual_scale;
          break;
        }
      }
      if (!ok) continue;
      if (z.imag() < 0.0) z = std::conj(z);  // conjugate pair; keep the upper one
      if (!found || z.real() > best.real()) {
        best = z;
        found = true;
      }
    }
  }
  if (!found) throw NumericError("quasi_poly_rightmost: no seed converged");
  RightmostRoot r;
  r.lambda = best;
  r.residual = std::abs(h(best));
  return r;
}

}  // namespace

RightmostRoot quasi_poly_rightmost(const CaseICoefficients& cc) {
  const double scale = std::max({std::abs(cc.a), std::abs(cc.b), std::abs(cc.c), 1e-3 / cc.tau});
  auto h = [&](cplx z) {
    const cplx e = std::exp(-z * cc.tau);
    const cplx g = z + cc.a + cc.b * e;
    return g * g - cc.c * cc.c * e * e;
  };
  auto hp = [&](cplx z) {
    const cplx e = std::exp(-z * cc.tau);
    const cplx g = z + cc.a + cc.b * e;
    return 2.0 * g * (1.0 - cc.b * cc.tau * e) + 2.0 * cc.tau * cc.c * cc.c * e * e;
  };
  return grid_newton(h, hp, scale, 1e-10 * std::max(1.0, scale * scale));
}

RightmostRoot quasi_poly_rightmost(const QuadCoefficients& qc) {
  const double scale =
      std::max({std::abs(qc.a), std::abs(qc.b), std::sqrt(std::abs(qc.c)),
                std::sqrt(std::abs(qc.d)), 1e-3 / qc.tau1});
  auto h = [&](cplx z) {
    const cplx e = std::exp(-z * qc.tau1);
    return z * z + qc.a * z + qc.b * z * e + qc.c * e + qc.d;
  };
  auto hp = [&](cplx z) {
    const cplx e = std::exp(-z * qc.tau1);
    return 2.0 * z + qc.a + qc.b * e - qc.tau1 * (qc.b * z + qc.c) * e;
  };
  return grid_newton(h, hp, scale, 1e-10 * std::max(1.0, scale * scale));
}

}  // namespace tcpfluid
