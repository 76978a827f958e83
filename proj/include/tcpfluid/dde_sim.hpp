#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tcpfluid/equilibrium.hpp"
#include "tcpfluid/multibottleneck_types.hpp"

namespace tcpfluid {

/// Uniformly sampled solution of a (delayed) differential equation.  Every
/// delay used during integration is an integer multiple of dt.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> w1;
  std::vector<double> w2;  // empty for scalar runs
  double dt = 0.0;
  std::vector<double> tau_grid;
  bool diverged = false;   // integration halted on NaN/overflow
  bool floor_hit = false;  // positivity floor (1e-9) was applied at least once
};

enum class CycleKind { converged, limit_cycle, divergent, undecided };

struct CycleVerdict {
  CycleKind kind = CycleKind::undecided;
  double amplitude = 0.0;  // (max - min)/2 over the analysis window; limit_cycle only
  double period = 0.0;     // mean peak spacing; limit_cycle only
  double mean = 0.0;
};

const char* to_string(CycleKind k);

using History = std::function<double(double)>;  // defined on [-tau, 0]

/// Fixed-step classical Runge-Kutta on w'(t) = rhs(w(t), w(t-tau)) by the
/// method of steps.  Delayed values at stage midpoints are read from the
/// stored samples through cubic Hermite interpolation; for t <= 0 the history
/// function is queried directly.  dt must divide tau.
Trajectory integrate_dde1(const std::function<double(double, double)>& rhs, double tau,
                          const History& history, double horizon, double dt);

/// Two-component variant: w_j'(t) = rhs_j(w_j(t), w1(t-tau1), w2(t-tau2)).
Trajectory integrate_dde2(
    const std::function<double(double, double, double)>& rhs1,
    const std::function<double(double, double, double)>& rhs2, double tau1, double tau2,
    const History& history1, const History& history2, double horizon, double dt);

/// Window dynamics w'(t) = (i(w(t)) [1-p]_ack - d(w(t)) p(w(t-tau))) w(t-tau) / tau0
/// where tau0 is the loss model's round trip time (it fixes both the loss
/// curve and the rate constant) and `tau` is the feedback delay being studied.
/// Passing tau equal to the model's rtt reproduces the physical system; any
/// other value realises the delay-swept bifurcation experiment for the fixed
/// coefficient pair (a, b).
Trajectory simulate_scalar(const ProtocolSpec& spec, const LossModel& loss,
                           EquilibriumVariant variant, double tau, const History& history,
                           double horizon, double dt);

/// Two-edge-router dynamics per the selected coefficient variant of the
/// topology.  Delay overrides play the same role as `tau` above; by default
/// the topology's own round trip times are used.
Trajectory simulate_pair(const MultiTopology& top, const History& history1,
                         const History& history2, double horizon, double dt,
                         std::optional<std::pair<double, double>> delay_override = std::nullopt);

/// Discards the leading transient_fraction of the samples and classifies the
/// remainder.  abs_tol keeps the convergence test meaningful for signals
/// decaying to zero.
CycleVerdict classify(const Trajectory& traj, int component = 0, double transient_fraction = 0.5,
                      double rel_tol = 1e-3, double abs_tol = 1e-9);

enum class SweepParameter { tau, buffer, alpha };

struct ScalarScenario {
  ProtocolSpec protocol;
  LossModel loss;
  EquilibriumVariant variant = EquilibriumVariant::plain;
  double delay = 0.0;        // feedback delay; 0 = use the loss model's rtt
  double horizon = 0.0;      // 0 = 50 * delay
  double dt = 0.0;           // 0 = delay / 200
  double history_rel = 0.9;  // constant history as a fraction of w*
};

Trajectory simulate_scalar(const ScalarScenario& sc);

struct SweepPoint {
  double parameter = 0.0;
  CycleVerdict verdict;
  std::string error;  // non-empty when this grid point failed
};

/// Simulates and classifies across a uniform grid of one scenario parameter.
/// Per-point failures are recorded and the sweep continues.
std::vector<SweepPoint> sweep_bifurcation(const ScalarScenario& sc, SweepParameter parameter,
                                          double lo, double hi, int steps, int jobs = 1);

/// Planar ODE x' = alpha x - y - x(x^2+y^2), y' = x + alpha y - y(x^2+y^2):
/// for alpha > 0 trajectories settle on a circular orbit of radius
/// sqrt(alpha); for alpha < 0 they spiral into the origin.  Serves as the
/// integrator/classifier calibration case with a known amplitude law.
std::pair<Trajectory, CycleVerdict> demo_hopf_normal_form(double alpha, double horizon, double dt);

std::vector<SweepPoint> sweep_normal_form(double alpha_lo, double alpha_hi, int steps,
                                          double horizon, double dt, int jobs = 1);

}  // namespace tcpfluid
