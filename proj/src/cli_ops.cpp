#include "tcpfluid/cli_ops.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace tcpfluid {

namespace {

json json_num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json verdict_to_json(const StabilityVerdict& v) {
  json j{{"stable", v.stable}, {"margin", v.margin}};
  if (v.condition == ConditionKind::delay_independent) j["condition"] = "delay_independent";
  if (v.condition == ConditionKind::non_oscillatory) j["sigma"] = json_num(v.sigma);
  return j;
}

}  // namespace

long buffer_rule(double capacity_pkts_per_s, double rtt_s, long flows) {
  if (!(capacity_pkts_per_s > 0.0) || !(rtt_s > 0.0) || flows < 1)
    throw DomainError("buffer rule requires positive capacity, rtt and flow count");
  return static_cast<long>(
      std::ceil(capacity_pkts_per_s * rtt_s / std::sqrt(static_cast<double>(flows))));
}

json equilibrium_report(const Scenario& sc) {
  if (sc.model == ScenarioModel::scalar) {
    const EquilibriumResult eq = solve_equilibrium(sc.protocol, sc.loss, sc.variant);
    return {{"w_star", eq.w_star},
            {"p_star", eq.p_star},
            {"x_star", eq.x_star},
            {"residual", eq.residual},
            {"variant", to_string(eq.variant)}};
  }
  if (sc.model == ScenarioModel::multibottleneck) {
    const MultiEquilibrium eq = multi_equilibrium(sc.topology);
    return {{"w_star", {eq.w1, eq.w2}},
            {"residual", {eq.residual1, eq.residual2}},
            {"coeff_variant", to_string(sc.topology.coeff_variant)}};
  }
  throw ConfigError("equilibrium: scenario must be scalar or multibottleneck");
}

namespace {

json scalar_stability_report(const Scenario& sc) {
  const EquilibriumResult eq = solve_equilibrium(sc.protocol, sc.loss, sc.variant);
  ScalarCoefficients c = scalar_coefficients(sc.protocol, sc.loss, eq);
  // A delay_s override evaluates the verdicts at that feedback delay while
  // the coefficients stay pinned to the loss model, mirroring simulate.
  if (sc.delay_s > 0.0) c.tau = sc.delay_s;
  json out;
  out["variant"] = to_string(sc.variant);
  out["equilibrium"] = {{"w_star", eq.w_star}, {"p_star", eq.p_star}, {"x_star", eq.x_star}};
  out["coefficients"] = {{"a", c.a}, {"b", c.b}, {"tau", c.tau}};
  if (c.a_negative) {
    // Outside the verdict preconditions; report coefficients only.
    out["warning"] = "a < 0: stability conditions do not apply";
    return out;
  }
  out["sufficient"] = verdict_to_json(sufficient_stable(c));
  out["necsuf"] = verdict_to_json(necsuf_stable(c));
  out["non_oscillatory"] = verdict_to_json(non_oscillatory(c));
  out["hopf_delay_s"] = c.b > c.a ? json(hopf_delay(c.a, c.b)) : json(nullptr);
  const RightmostRoot r = rightmost_root(c);
  out["rightmost_root"] = {{"re", r.lambda.real()}, {"im", r.lambda.imag()},
                           {"residual", r.residual}};
  return out;
}

json multi_stability_report(const Scenario& sc) {
  const MultiTopology& top = sc.topology;
  const MultiEquilibrium eq = multi_equilibrium(top);
  const MultiCoefficients mc = multi_coefficients(top, eq.w1, eq.w2);
  json out;
  out["coeff_variant"] = to_string(top.coeff_variant);
  out["w_star"] = {eq.w1, eq.w2};
  out["coefficients"] = {{"M1", mc.M1}, {"M2", mc.M2}, {"N1", mc.N1},
                         {"N2", mc.N2}, {"P1", mc.P1}, {"P2", mc.P2}};

  const bool symmetric = top.B1 == top.B2 && top.B1 == top.B && top.C1 == top.C2 &&
                         top.C1 == top.C && top.tau1 == top.tau2;
  if (symmetric) {
    const CaseICoefficients cc{mc.M1, mc.N1, mc.P1, top.tau1};
    const CaseIAnalysis an = case1_analyze(cc);
    out["case"] = "case1";
    out["reduced"] = {{"a", cc.a}, {"b", cc.b}, {"c", cc.c}, {"tau", cc.tau}};
    json omegas = json::object();
    omegas["omega1"] = an.omega1 ? json(*an.omega1) : json(nullptr);
    omegas["omega2"] = an.omega2 ? json(*an.omega2) : json(nullptr);
    out["omegas"] = omegas;
    json delays = json::object();
    delays["tau1c_s"] = an.tau1c ? json(*an.tau1c) : json(nullptr);
    delays["tau2c_s"] = an.tau2c ? json(*an.tau2c) : json(nullptr);
    delays["tau_c_s"] = an.tau_c ? json(*an.tau_c) : json(nullptr);
    out["critical_delays"] = delays;
    out["classification"] = an.delay_independent ? "delay_independent" : "hopf_at_tau_c";
    out["verdict"] = {{"stable", an.stable}, {"margin", an.margin}};
    if (an.omega1) {
      out["transversality"] =
          transversality_case1(cc.a, cc.b, cc.c, *an.tau1c, 1.0);
    }
  } else {
    const Case2Reduction red = case2_reduce(top);
    const CaseIIAnalysis an = case2_analyze(red.qc);
    out["case"] = "case2";
    out["reduced"] = {{"a", red.qc.a}, {"b", red.qc.b},    {"c", red.qc.c},
                      {"d", red.qc.d}, {"tau1", red.qc.tau1}};
    out["eps_sensitivity"] = red.eps_sensitivity;
    json omegas = json::array();
    for (double w2 : an.omega_sq) omegas.push_back(std::sqrt(w2));
    out["omegas"] = omegas;
    json delays = json::array();
    for (double d : an.crossing_delays) delays.push_back(d);
    out["critical_delays"] = delays;
    out["classification"] = to_string(an.classification);
    out["verdict"] = {{"stable", an.stable}, {"switches_possible", an.switches_possible}};
    if (an.omega && an.tau1c) {
      const Case2Transversality tr = transversality_case2(red.qc, *an.omega, 1.0, *an.tau1c);
      out["transversality"] = {{"term3_real", tr.term3_real},
                               {"total_sign_positive", tr.total_sign_positive},
                               {"d_positive", tr.d_positive}};
    }
  }
  return out;
}

}  // namespace

json stability_report(const Scenario& sc, int) {
  if (sc.model == ScenarioModel::scalar) return scalar_stability_report(sc);
  if (sc.model == ScenarioModel::multibottleneck) return multi_stability_report(sc);
  throw ConfigError("stability: scenario must be scalar or multibottleneck");
}

std::vector<ChartCell> chart_grid(const Scenario& sc, int jobs) {
  if (sc.model != ScenarioModel::scalar)
    throw ConfigError("chart: scenario must be scalar");
  if (!sc.chart) throw ConfigError("chart: scenario lacks a chart block");
  if (sc.protocol.kind != ProtocolKind::compound)
    throw ConfigError("chart: protocol must be compound (alpha axis)");
  const ChartSpec& ch = *sc.chart;

  std::vector<ChartCell> cells;
  for (int i = 0; i < ch.alpha_steps; ++i) {
    const double alpha = ch.alpha_steps == 1
                             ? ch.alpha_min
                             : ch.alpha_min + (ch.alpha_max - ch.alpha_min) * i / (ch.alpha_steps - 1);
    for (int jb = 0; jb < ch.b_steps; ++jb) {
      const double buf =
          ch.b_steps == 1 ? ch.b_min : ch.b_min + (ch.b_max - ch.b_min) * jb / (ch.b_steps - 1);
      ChartCell cell;
      cell.alpha = alpha;
      cell.buffer = buf;
      cells.push_back(cell);
    }
  }

  auto fill = [&sc](ChartCell& cell) {
    try {
      ProtocolSpec p = ProtocolSpec::compound(cell.alpha, sc.protocol.beta, sc.protocol.k);
      LossModel loss = sc.loss;
      std::visit([&cell](auto& m) { m.buffer_pkts = cell.buffer; }, loss);
      const EquilibriumResult eq = solve_equilibrium(p, loss, sc.variant);
      const ScalarCoefficients c = scalar_coefficients(p, loss, eq);
      const StabilityVerdict ns = necsuf_stable(c);
      const StabilityVerdict no = non_oscillatory(c);
      cell.margin_necsuf = ns.margin;
      cell.margin_nonosc = no.margin;
      cell.label = !ns.stable ? "unstable" : (no.stable ? "non_oscillatory" : "stable_oscillatory");
    } catch (const std::exception&) {
      cell.label = "error";
      cell.margin_necsuf = cell.margin_nonosc = std::nan("");
    }
  };

  if (jobs <= 1) {
    for (auto& cell : cells) fill(cell);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        fill(cells[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < std::min<int>(jobs, static_cast<int>(cells.size())); ++i)
      pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return cells;
}

std::string chart_csv(const std::vector<ChartCell>& cells) {
  std::ostringstream os;
  os << "alpha,B,label,margin_necsuf,margin_nonosc\n";
  for (const auto& c : cells) {
    os << format_number(c.alpha) << ',' << format_number(c.buffer) << ',' << c.label << ','
       << (std::isfinite(c.margin_necsuf) ? format_number(c.margin_necsuf) : "nan") << ','
       << (std::isfinite(c.margin_nonosc) ? format_number(c.margin_nonosc) : "nan") << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  const bool pair = !traj.w2.empty();
  os << (pair ? "t,w1,w2\n" : "t,w1\n");
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    os << format_number(traj.t[i]) << ',' << format_number(traj.w1[i]);
    if (pair) os << ',' << format_number(traj.w2[i]);
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "param,kind,amplitude,period,mean\n";
  for (const auto& pt : points) {
    os << format_number(pt.parameter) << ',';
    if (!pt.error.empty()) {
      os << "error,nan,nan,nan\n";
      continue;
    }
    os << to_string(pt.verdict.kind) << ',' << format_number(pt.verdict.amplitude) << ','
       << format_number(pt.verdict.period) << ',' << format_number(pt.verdict.mean) << '\n';
  }
  return os.str();
}

std::string queue_dist_csv(const QueueDist& dist) {
  std::ostringstream os;
  os << "n,pmf,ccdf\n";
  for (std::size_t n = 0; n < dist.probs.size(); ++n)
    os << n << ',' << format_number(dist.probs[n]) << ','
       << format_number(dist.ccdf(static_cast<int>(n))) << '\n';
  return os.str();
}

Trajectory run_simulation(const Scenario& sc) {
  if (sc.model == ScenarioModel::scalar) {
    ScalarScenario s{sc.protocol, sc.loss,    sc.variant,
                     sc.delay_s,  sc.sim.horizon_s, sc.sim.dt_s,
                     sc.sim.history_rel};
    return simulate_scalar(s);
  }
  if (sc.model == ScenarioModel::multibottleneck) {
    const MultiTopology& top = sc.topology;
    const MultiEquilibrium eq = multi_equilibrium(top);
    const double tmax = std::max(top.tau1, top.tau2);
    const double dt = sc.sim.dt_s > 0.0 ? sc.sim.dt_s : std::min(top.tau1, top.tau2) / 200.0;
    const double horizon = sc.sim.horizon_s > 0.0 ? sc.sim.horizon_s : 50.0 * tmax;
    const double h1 = sc.sim.history_rel * eq.w1;
    const double h2 = sc.sim.history_rel * eq.w2;
    return simulate_pair(top, [h1](double) { return h1; }, [h2](double) { return h2; }, horizon,
                         dt);
  }
  if (sc.model == ScenarioModel::normal_form) {
    const double horizon = sc.sim.horizon_s > 0.0 ? sc.sim.horizon_s : 400.0;
    const double dt = sc.sim.dt_s > 0.0 ? sc.sim.dt_s : 1e-3;
    return demo_hopf_normal_form(sc.normal_form_alpha, horizon, dt).first;
  }
  throw ConfigError("simulate: unsupported scenario model");
}

std::vector<SweepPoint> run_bifurcation(const Scenario& sc, int jobs) {
  if (!sc.sweep) throw ConfigError("bifurcation: scenario lacks a sweep block");
  const SweepSpec& sw = *sc.sweep;

  if (sc.model == ScenarioModel::normal_form) {
    if (sw.parameter != "alpha") throw ConfigError("normal_form sweep parameter must be alpha");
    const double horizon = sc.sim.horizon_s > 0.0 ? sc.sim.horizon_s : 600.0;
    const double dt = sc.sim.dt_s > 0.0 ? sc.sim.dt_s : 1e-3;
    return sweep_normal_form(sw.min, sw.max, sw.steps, horizon, dt, jobs);
  }

  if (sc.model == ScenarioModel::scalar) {
    SweepParameter par;
    if (sw.parameter == "tau")
      par = SweepParameter::tau;
    else if (sw.parameter == "B")
      par = SweepParameter::buffer;
    else if (sw.parameter == "alpha")
      par = SweepParameter::alpha;
    else
      throw ConfigError("unknown sweep parameter: " + sw.parameter);
    ScalarScenario s{sc.protocol, sc.loss,    sc.variant,
                     sc.delay_s,  sc.sim.horizon_s, sc.sim.dt_s,
                     sc.sim.history_rel};
    return sweep_bifurcation(s, par, sw.min, sw.max, sw.steps, jobs);
  }

  if (sc.model == ScenarioModel::multibottleneck) {
    if (sw.parameter != "tau")
      throw ConfigError("multibottleneck sweeps support only the tau parameter");
    const MultiTopology& top = sc.topology;
    const MultiEquilibrium eq = multi_equilibrium(top);
    const double h1 = sc.sim.history_rel * eq.w1;
    const double h2 = sc.sim.history_rel * eq.w2;
    std::vector<double> grid(static_cast<std::size_t>(sw.steps));
    for (int i = 0; i < sw.steps; ++i)
      grid[static_cast<std::size_t>(i)] =
          sw.steps == 1 ? sw.min : sw.min + (sw.max - sw.min) * i / (sw.steps - 1);
    std::vector<SweepPoint> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out[i].parameter = grid[i];
      try {
        const double tau = grid[i];
        const double dt = sc.sim.dt_s > 0.0 ? sc.sim.dt_s : tau / 200.0;
        const double horizon = sc.sim.horizon_s > 0.0 ? sc.sim.horizon_s : 50.0 * tau;
        const Trajectory traj =
            simulate_pair(top, [h1](double) { return h1; }, [h2](double) { return h2; }, horizon,
                          dt, std::pair{tau, tau});
        out[i].verdict = classify(traj);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
    return out;
  }
  throw ConfigError("bifurcation: unsupported scenario model");
}

}  // namespace tcpfluid
