#pragma once

#include <string>
#include <vector>

#include "tcpfluid/json_io.hpp"
#include "tcpfluid/multibottleneck.hpp"
#include "tcpfluid/queue_stats.hpp"
#include "tcpfluid/scalar_stability.hpp"

namespace tcpfluid {

// ceil(C * RTT / sqrt(N)): buffer dimensioning for the intermediate regime.
long buffer_rule(double capacity_pkts_per_s, double rtt_s, long flows);

json equilibrium_report(const Scenario& sc);
json stability_report(const Scenario& sc, int jobs = 1);

struct ChartCell {
  double alpha = 0.0;
  double buffer = 0.0;
  std::string label;  // non_oscillatory | stable_oscillatory | unstable | error
  double margin_necsuf = 0.0;
  double margin_nonosc = 0.0;
};

/// Per-cell region labels over an (alpha, B) grid from the scalar verdict
/// stack: unstable outside the delay-robust region, otherwise split by the
/// non-oscillatory test.
std::vector<ChartCell> chart_grid(const Scenario& sc, int jobs = 1);
std::string chart_csv(const std::vector<ChartCell>& cells);

std::string trajectory_csv(const Trajectory& traj);
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string queue_dist_csv(const QueueDist& dist);

Trajectory run_simulation(const Scenario& sc);
std::vector<SweepPoint> run_bifurcation(const Scenario& sc, int jobs = 1);

}  // namespace tcpfluid
