#include "tcpfluid/dde_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace tcpfluid {

namespace {

constexpr double kPositivityFloor = 1e-9;

// Number of dt steps making up the delay; dt must divide tau to ~1e-9.
long delay_steps(double tau, double dt) {
  const double ratio = tau / dt;
  const long m = std::lround(ratio);
  if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
    throw ConfigError("dt must divide the delay");
  return m;
}

// Cubic Hermite value at the midpoint of a unit segment with endpoint values
// y0, y1 and endpoint slopes (per segment) d0, d1.
inline double hermite_mid(double y0, double y1, double d0, double d1) {
  return 0.5 * (y0 + y1) + 0.125 * (d0 - d1);
}

}  // namespace

const char* to_string(CycleKind k) {
  switch (k) {
    case CycleKind::converged: return "converged";
    case CycleKind::limit_cycle: return "limit_cycle";
    case CycleKind::divergent: return "divergent";
    case CycleKind::undecided: return "undecided";
  }
  return "?";
}

Trajectory integrate_dde1(const std::function<double(double, double)>& rhs, double tau,
                          const History& history, double horizon, double dt) {
  if (!(tau > 0.0) || !(dt > 0.0) || !(horizon > 0.0))
    throw ConfigError("integrate_dde1: tau, dt and horizon must be positive");
  const long m = delay_steps(tau, dt);
  dt = tau / static_cast<double>(m);  // cancel representation drift
  const long n = std::lround(std::ceil(horizon / dt - 1e-9));

  Trajectory traj;
  traj.dt = dt;
  traj.tau_grid = {tau};

  std::vector<double> w(static_cast<std::size_t>(n + m + 1));
  std::vector<double> slope(w.size());  // dt * w'
  auto idx = [m](long j) { return static_cast<std::size_t>(j + m); };

  for (long j = -m; j <= 0; ++j) {
    const double t = static_cast<double>(j) * dt;
    w[idx(j)] = history(t);
    if (!(w[idx(j)] > 0.0)) throw ConfigError("integrate_dde1: history must be positive");
  }
  slope[idx(0)] = dt * rhs(w[idx(0)], w[idx(-m)]);

  auto delayed_mid = [&](long j) {
    // Value at t_j + dt/2 - tau = grid point (j - m) plus half a step.  For
    // lookups that land in the history range the function is queried
    // directly; interpolation only ever reads computed segments.
    const double t = (static_cast<double>(j - m) + 0.5) * dt;
    if (t <= 0.0) return history(t);
    const std::size_t i = idx(j - m);
    return hermite_mid(w[i], w[i + 1], slope[i], slope[i + 1]);
  };

  bool diverged = false;
  long last = n;
  for (long j = 0; j < n; ++j) {
    const double wj = w[idx(j)];
    const double d0 = w[idx(j - m)];
    const double dmid = delayed_mid(j);
    const double d1 = w[idx(j + 1 - m)];

    const double k1 = rhs(wj, d0);
    const double k2 = rhs(wj + 0.5 * dt * k1, dmid);
    const double k3 = rhs(wj + 0.5 * dt * k2, dmid);
    const double k4 = rhs(wj + dt * k3, d1);
    double next = wj + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!std::isfinite(next) || std::abs(next) > 1e12) {
      diverged = true;
      last = j;
      break;
    }
    if (next < kPositivityFloor) {
      next = kPositivityFloor;
      traj.floor_hit = true;
    }
    w[idx(j + 1)] = next;
    slope[idx(j + 1)] = dt * rhs(next, d1);
  }

  traj.diverged = diverged;
  traj.t.reserve(static_cast<std::size_t>(last) + 1);
  traj.w1.reserve(static_cast<std::size_t>(last) + 1);
  for (long j = 0; j <= last; ++j) {
    traj.t.push_back(static_cast<double>(j) * dt);
    traj.w1.push_back(w[idx(j)]);
  }
  return traj;
}

Trajectory integrate_dde2(const std::function<double(double, double, double)>& rhs1,
                          const std::function<double(double, double, double)>& rhs2, double tau1,
                          double tau2, const History& history1, const History& history2,
                          double horizon, double dt) {
  if (!(tau1 > 0.0) || !(tau2 > 0.0) || !(dt > 0.0) || !(horizon > 0.0))
    throw ConfigError("integrate_dde2: delays, dt and horizon must be positive");
  const long m1 = delay_steps(tau1, dt);
  const long m2 = delay_steps(tau2, dt);
  const long m = std::max(m1, m2);
  const long n = std::lround(std::ceil(horizon / dt - 1e-9));

  Trajectory traj;
  traj.dt = dt;
  traj.tau_grid = {tau1, tau2};

  std::vector<double> w1(static_cast<std::size_t>(n + m + 1)), w2(w1.size());
  std::vector<double> s1(w1.size()), s2(w1.size());  // dt * w'
  auto idx = [m](long j) { return static_cast<std::size_t>(j + m); };

  for (long j = -m; j <= 0; ++j) {
    const double t = static_cast<double>(j) * dt;
    w1[idx(j)] = history1(t);
    w2[idx(j)] = history2(t);
    if (!(w1[idx(j)] > 0.0) || !(w2[idx(j)] > 0.0))
      throw ConfigError("integrate_dde2: histories must be positive");
  }
  s1[idx(0)] = dt * rhs1(w1[idx(0)], w1[idx(-m1)], w2[idx(-m2)]);
  s2[idx(0)] = dt * rhs2(w2[idx(0)], w1[idx(-m1)], w2[idx(-m2)]);

  auto mid = [&](const std::vector<double>& w, const std::vector<double>& s, const History& h,
                 long j, long mdel) {
    const double t = (static_cast<double>(j - mdel) + 0.5) * dt;
    if (t <= 0.0) return h(t);
    const std::size_t i = idx(j - mdel);
    return hermite_mid(w[i], w[i + 1], s[i], s[i + 1]);
  };

  bool diverged = false;
  long last = n;
  for (long j = 0; j < n; ++j) {
    const double a0 = w1[idx(j - m1)], b0 = w2[idx(j - m2)];
    const double am = mid(w1, s1, history1, j, m1), bm = mid(w2, s2, history2, j, m2);
    const double a1 = w1[idx(j + 1 - m1)], b1 = w2[idx(j + 1 - m2)];
    const double u = w1[idx(j)], v = w2[idx(j)];

    const double k1u = rhs1(u, a0, b0), k1v = rhs2(v, a0, b0);
    const double k2u = rhs1(u + 0.5 * dt * k1u, am, bm), k2v = rhs2(v + 0.5 * dt * k1v, am, bm);
    const double k3u = rhs1(u + 0.5 * dt * k2u, am, bm), k3v = rhs2(v + 0.5 * dt * k2v, am, bm);
    const double k4u = rhs1(u + dt * k3u, a1, b1), k4v = rhs2(v + dt * k3v, a1, b1);
    double nu = u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    double nv = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    if (!std::isfinite(nu) || !std::isfinite(nv) || std::abs(nu) > 1e12 || std::abs(nv) > 1e12) {
      diverged = true;
      last = j;
      break;
    }
    if (nu < kPositivityFloor) nu = kPositivityFloor, traj.floor_hit = true;
    if (nv < kPositivityFloor) nv = kPositivityFloor, traj.floor_hit = true;
    w1[idx(j + 1)] = nu;
    w2[idx(j + 1)] = nv;
    s1[idx(j + 1)] = dt * rhs1(nu, a1, b1);
    s2[idx(j + 1)] = dt * rhs2(nv, a1, b1);
  }

  traj.diverged = diverged;
  for (long j = 0; j <= last; ++j) {
    traj.t.push_back(static_cast<double>(j) * dt);
    traj.w1.push_back(w1[idx(j)]);
    traj.w2.push_back(w2[idx(j)]);
  }
  return traj;
}

Trajectory simulate_scalar(const ProtocolSpec& spec, const LossModel& loss,
                           EquilibriumVariant variant, double tau, const History& history,
                           double horizon, double dt) {
  validate(loss);
  const double tau0 = loss_rtt(loss);
  auto rhs = [&spec, &loss, variant, tau0](double w_now, double w_delayed) {
    const LossValue lv = loss_prob(loss, std::max(w_delayed, kPositivityFloor));
    const double ack = variant == EquilibriumVariant::ack_weighted ? 1.0 - lv.p : 1.0;
    return (increase_gain(spec, w_now) * ack - decrease_gain(spec, w_now) * lv.p) * w_delayed /
           tau0;
  };
  return integrate_dde1(rhs, tau, history, horizon, dt);
}

Trajectory simulate_scalar(const ScalarScenario& sc) {
  const double tau = sc.delay > 0.0 ? sc.delay : loss_rtt(sc.loss);
  const double dt = sc.dt > 0.0 ? sc.dt : tau / 200.0;
  const double horizon = sc.horizon > 0.0 ? sc.horizon : 50.0 * tau;
  const EquilibriumResult eq = solve_equilibrium(sc.protocol, sc.loss, sc.variant);
  const double w0 = sc.history_rel * eq.w_star;
  return simulate_scalar(sc.protocol, sc.loss, sc.variant, tau, [w0](double) { return w0; },
                         horizon, dt);
}

Trajectory simulate_pair(const MultiTopology& top, const History& history1,
                         const History& history2, double horizon, double dt,
                         std::optional<std::pair<double, double>> delay_override) {
  validate(top);
  const double tau1 = delay_override ? delay_override->first : top.tau1;
  const double tau2 = delay_override ? delay_override->second : top.tau2;
  auto rhs1 = [&top](double w_now, double w1d, double w2d) {
    return pair_drift(top, 1, w_now, w1d, w2d);
  };
  auto rhs2 = [&top](double w_now, double w1d, double w2d) {
    return pair_drift(top, 2, w_now, w1d, w2d);
  };
  return integrate_dde2(rhs1, rhs2, tau1, tau2, history1, history2, horizon, dt);
}

CycleVerdict classify(const Trajectory& traj, int component, double transient_fraction,
                      double rel_tol, double abs_tol) {
  const std::vector<double>& w = component == 0 ? traj.w1 : traj.w2;
  CycleVerdict v;
  if (traj.diverged) {
    v.kind = CycleKind::divergent;
    return v;
  }
  if (w.size() < 8) return v;

  const std::size_t start = static_cast<std::size_t>(transient_fraction * w.size());
  const std::size_t count = w.size() - start;
  if (count < 8) return v;

  double lo = w[start], hi = w[start], sum = 0.0;
  for (std::size_t i = start; i < w.size(); ++i) {
    lo = std::min(lo, w[i]);
    hi = std::max(hi, w[i]);
    sum += w[i];
  }
  v.mean = sum / static_cast<double>(count);

  if (hi - lo < rel_tol * std::abs(v.mean) + abs_tol) {
    v.kind = CycleKind::converged;
    return v;
  }

  // Interior local maxima, refined by a parabolic fit through the neighbours.
  std::vector<double> peak_t, peak_h;
  for (std::size_t i = start + 1; i + 1 < w.size(); ++i) {
    if (w[i] > w[i - 1] && w[i] >= w[i + 1]) {
      const double denom = w[i - 1] - 2.0 * w[i] + w[i + 1];
      double shift = 0.0, height = w[i];
      if (denom < 0.0) {
        shift = 0.5 * (w[i - 1] - w[i + 1]) / denom;
        height = w[i] - 0.25 * (w[i - 1] - w[i + 1]) * shift;
      }
      peak_t.push_back(traj.t[i] + shift * traj.dt);
      peak_h.push_back(height);
    }
  }

  if (peak_h.size() >= 5) {
    double pm = 0.0;
    for (double h : peak_h) pm += h;
    pm /= static_cast<double>(peak_h.size());
    double var = 0.0;
    for (double h : peak_h) var += (h - pm) * (h - pm);
    var /= static_cast<double>(peak_h.size());
    const double cv = std::sqrt(var) / std::abs(pm);
    if (cv < 0.01) {
      v.kind = CycleKind::limit_cycle;
      v.amplitude = 0.5 * (hi - lo);
      v.period = (peak_t.back() - peak_t.front()) / static_cast<double>(peak_t.size() - 1);
      return v;
    }
  }
  v.kind = CycleKind::undecided;
  return v;
}

namespace {

// Runs one job per sweep cell on up to `jobs` threads; results land in grid
// order regardless of completion order.
std::vector<SweepPoint> run_sweep(const std::vector<double>& grid,
                                  const std::function<SweepPoint(double)>& cell, int jobs) {
  std::vector<SweepPoint> out(grid.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = cell(grid[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      out[i] = cell(grid[i]);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(jobs, static_cast<int>(grid.size()));
  pool.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw ConfigError("sweep needs at least one step");
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    g[static_cast<std::size_t>(i)] =
        steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
  return g;
}

}  // namespace

std::vector<SweepPoint> sweep_bifurcation(const ScalarScenario& sc, SweepParameter parameter,
                                          double lo, double hi, int steps, int jobs) {
  auto cell = [&sc, parameter](double value) {
    SweepPoint pt;
    pt.parameter = value;
    try {
      ScalarScenario s = sc;
      switch (parameter) {
        case SweepParameter::tau: s.delay = value; break;
        case SweepParameter::buffer:
          std::visit([value](auto& m) { m.buffer_pkts = value; }, s.loss);
          break;
        case SweepParameter::alpha:
          if (s.protocol.kind != ProtocolKind::compound)
            throw DomainError("alpha sweep requires a Compound protocol");
          s.protocol.alpha = value;
          break;
      }
      const Trajectory traj = simulate_scalar(s);
      pt.verdict = classify(traj);
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    return pt;
  };
  return run_sweep(linspace(lo, hi, steps), cell, jobs);
}

std::pair<Trajectory, CycleVerdict> demo_hopf_normal_form(double alpha, double horizon,
                                                          double dt) {
  if (!(std::abs(alpha) <= 1.0)) throw ConfigError("normal form demo: |alpha| must be <= 1");
  if (!(dt > 0.0 && dt <= 1e-3)) throw ConfigError("normal form demo: dt must be in (0, 1e-3]");
  const long n = std::lround(std::ceil(horizon / dt));

  Trajectory traj;
  traj.dt = dt;
  traj.t.reserve(static_cast<std::size_t>(n) + 1);
  traj.w1.reserve(static_cast<std::size_t>(n) + 1);
  traj.w2.reserve(static_cast<std::size_t>(n) + 1);

  auto fx = [alpha](double x, double y) { return alpha * x - y - x * (x * x + y * y); };
  auto fy = [alpha](double x, double y) { return x + alpha * y - y * (x * x + y * y); };

  double x = 0.5, y = 0.0;
  traj.t.push_back(0.0);
  traj.w1.push_back(x);
  traj.w2.push_back(y);
  for (long j = 0; j < n; ++j) {
    const double k1x = fx(x, y), k1y = fy(x, y);
    const double k2x = fx(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y);
    const double k2y = fy(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y);
    const double k3x = fx(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y);
    const double k3y = fy(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y);
    const double k4x = fx(x + dt * k3x, y + dt * k3y);
    const double k4y = fy(x + dt * k3x, y + dt * k3y);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    traj.t.push_back(static_cast<double>(j + 1) * dt);
    traj.w1.push_back(x);
    traj.w2.push_back(y);
  }
  // Classify on x(t); the orbit radius equals the oscillation amplitude of x.
  const CycleVerdict v = classify(traj, 0, 0.5, 1e-3, 1e-6);
  return {traj, v};
}

std::vector<SweepPoint> sweep_normal_form(double alpha_lo, double alpha_hi, int steps,
                                          double horizon, double dt, int jobs) {
  auto cell = [horizon, dt](double alpha) {
    SweepPoint pt;
    pt.parameter = alpha;
    try {
      pt.verdict = demo_hopf_normal_form(alpha, horizon, dt).second;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    return pt;
  };
  return run_sweep(linspace(alpha_lo, alpha_hi, steps), cell, jobs);
}

}  // namespace tcpfluid
