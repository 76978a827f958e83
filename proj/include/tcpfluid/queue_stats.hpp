#pragma once

#include <vector>

#include "tcpfluid/errors.hpp"

namespace tcpfluid {

/// Stationary occupancy distribution of a finite-buffer queue.
struct QueueDist {
  std::vector<double> probs;  // occupancy 0..B
  double rho = 0.0;           // offered load
  int buffer = 0;

  double pmf(int n) const { return probs.at(static_cast<std::size_t>(n)); }
  // P(occupancy >= n); ccdf(0) == 1.
  double ccdf(int n) const;
};

/// M/M/1/B occupancy: pi_n = rho^n (1-rho)/(1-rho^{B+1}); uniform at rho = 1.
QueueDist mm1b_dist(double rho, int B);

double mm1b_blocking(double rho, int B);

// rho^B minus the exact M/M/1/B blocking probability: the error committed by
// the utilisation power-law loss approximation.  Closes as B grows at fixed
// rho < 1; approaches B/(B+1) as rho -> 1.
double power_law_loss_gap(double rho, int B);

/// M/D/1/B occupancy: stationary vector of the departure-epoch embedded chain
/// (Poisson arrivals, one deterministic service per step, buffer truncation),
/// solved by power iteration to 1e-13 and converted to time-stationary
/// probabilities through p_n = pi_n/(pi_0 + rho), p_B = 1 - 1/(pi_0 + rho).
QueueDist md1b_dist(double rho, int B);

}  // namespace tcpfluid
