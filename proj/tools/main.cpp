// Command-line front end: scenario files in, verdicts/curves/trajectories out
// as CSV or JSON for external plotting and scripting.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tcpfluid/cli_ops.hpp"

namespace {

using namespace tcpfluid;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + out_path);
  out << text;
}

struct CommonOpts {
  std::string scenario_path;
  std::string out_path;
  std::string format;
  std::string variant;
  std::string coeff_variant;
  int jobs = 1;
};

// Each subcommand has one natural output format; the flag is validated
// against it so a silently ignored request cannot happen.
void add_common(CLI::App* cmd, CommonOpts& o, const std::string& natural_format) {
  cmd->add_option("--scenario", o.scenario_path, "scenario JSON file")->required();
  cmd->add_option("--out", o.out_path, "output path (default stdout)");
  o.format = natural_format;
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({natural_format}));
  cmd->add_option("--variant", o.variant, "plain|ack_weighted (overrides scenario)");
  cmd->add_option("--coeff-variant", o.coeff_variant, "extended|appendix (overrides scenario)");
  cmd->add_option("--jobs", o.jobs, "worker threads for grid commands")->check(CLI::PositiveNumber);
}

Scenario load_with_overrides(const CommonOpts& o) {
  Scenario sc = load_scenario(o.scenario_path);
  if (!o.variant.empty()) sc.variant = variant_from_string(o.variant);
  if (!o.coeff_variant.empty())
    sc.topology.coeff_variant = coeff_variant_from_string(o.coeff_variant);
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability laboratory for fluid models of TCP congestion avoidance"};
  app.require_subcommand(1);

  CommonOpts eq_o, st_o, ch_o, sim_o, bif_o, multi_o;
  std::string qd_kind = "mm1b";
  double qd_rho = 0.5;
  int qd_buffer = 15;
  std::string qd_out, qd_format = "csv";
  double br_capacity = 0.0, br_rtt = 0.0;
  long br_flows = 0;
  std::string br_out, br_format = "json";

  auto* eq_cmd = app.add_subcommand("equilibrium", "solve for the operating point");
  add_common(eq_cmd, eq_o, "json");
  auto* st_cmd = app.add_subcommand("stability", "all verdicts for a scenario");
  add_common(st_cmd, st_o, "json");
  auto* ch_cmd = app.add_subcommand("chart", "region labels over an (alpha, B) grid");
  add_common(ch_cmd, ch_o, "csv");
  auto* sim_cmd = app.add_subcommand("simulate", "integrate the model; trajectory CSV");
  add_common(sim_cmd, sim_o, "csv");
  auto* bif_cmd = app.add_subcommand("bifurcation", "sweep a parameter; verdict CSV");
  add_common(bif_cmd, bif_o, "csv");
  auto* multi_cmd = app.add_subcommand("multibottleneck", "two-edge-router analysis report");
  add_common(multi_cmd, multi_o, "json");

  auto* qd_cmd = app.add_subcommand("queue-dist", "finite-buffer queue distribution CSV");
  qd_cmd->add_option("--kind", qd_kind, "mm1b|md1b")->check(CLI::IsMember({"mm1b", "md1b"}));
  qd_cmd->add_option("--rho", qd_rho, "offered load")->required();
  qd_cmd->add_option("--buffer", qd_buffer, "buffer size in packets")->required();
  qd_cmd->add_option("--out", qd_out, "output path (default stdout)");
  qd_cmd->add_option("--format", qd_format, "csv")->check(CLI::IsMember({"csv"}));

  auto* br_cmd = app.add_subcommand("buffer-rule", "intermediate-regime buffer dimensioning");
  br_cmd->add_option("--capacity-pkts-per-s", br_capacity, "bottleneck capacity")->required();
  br_cmd->add_option("--rtt-s", br_rtt, "average round trip time")->required();
  br_cmd->add_option("--flows", br_flows, "number of long-lived flows")->required();
  br_cmd->add_option("--out", br_out, "output path (default stdout)");
  br_cmd->add_option("--format", br_format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage problems land on the input-error exit code; --help stays 0.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*eq_cmd) {
      const json report = equilibrium_report(load_with_overrides(eq_o));
      write_output(report.dump(2) + "\n", eq_o.out_path);
    } else if (*st_cmd) {
      const json report = stability_report(load_with_overrides(st_o), st_o.jobs);
      write_output(report.dump(2) + "\n", st_o.out_path);
    } else if (*ch_cmd) {
      const auto cells = chart_grid(load_with_overrides(ch_o), ch_o.jobs);
      write_output(chart_csv(cells), ch_o.out_path);
    } else if (*sim_cmd) {
      const Trajectory traj = run_simulation(load_with_overrides(sim_o));
      write_output(trajectory_csv(traj), sim_o.out_path);
    } else if (*bif_cmd) {
      const auto points = run_bifurcation(load_with_overrides(bif_o), bif_o.jobs);
      write_output(sweep_csv(points), bif_o.out_path);
    } else if (*multi_cmd) {
      Scenario sc = load_with_overrides(multi_o);
      if (sc.model != ScenarioModel::multibottleneck)
        throw ConfigError("multibottleneck: scenario model must be multibottleneck");
      const json report = stability_report(sc, multi_o.jobs);
      write_output(report.dump(2) + "\n", multi_o.out_path);
    } else if (*qd_cmd) {
      const QueueDist dist =
          qd_kind == "mm1b" ? mm1b_dist(qd_rho, qd_buffer) : md1b_dist(qd_rho, qd_buffer);
      write_output(queue_dist_csv(dist), qd_out);
    } else if (*br_cmd) {
      const long pkts = buffer_rule(br_capacity, br_rtt, br_flows);
      if (br_format == "csv")
        write_output("buffer_pkts\n" + std::to_string(pkts) + "\n", br_out);
      else
        write_output(json{{"buffer_pkts", pkts}}.dump(2) + "\n", br_out);
    }
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
