#include "tcpfluid/queue_stats.hpp"

#include <algorithm>
#include <cmath>

namespace tcpfluid {

namespace {

void check_inputs(double rho, int B) {
  if (!(rho > 0.0)) throw DomainError("queue distribution requires rho > 0");
  if (B < 1) throw DomainError("queue distribution requires B >= 1");
}

void check_normalised(std::vector<double>& p) {
  double sum = 0.0;
  for (double x : p) sum += x;
  if (std::abs(sum - 1.0) > 1e-12) throw NumericError("queue distribution does not sum to 1");
  for (double& x : p) x /= sum;
}

}  // namespace

double QueueDist::ccdf(int n) const {
  double s = 0.0;
  for (std::size_t i = static_cast<std::size_t>(n); i < probs.size(); ++i) s += probs[i];
  return s;
}

QueueDist mm1b_dist(double rho, int B) {
  check_inputs(rho, B);
  QueueDist d;
  d.rho = rho;
  d.buffer = B;
  d.probs.resize(static_cast<std::size_t>(B) + 1);
  if (rho == 1.0) {
    for (double& p : d.probs) p = 1.0 / static_cast<double>(B + 1);
    return d;
  }
  const double norm = (1.0 - rho) / (1.0 - std::pow(rho, B + 1));
  for (int n = 0; n <= B; ++n) d.probs[static_cast<std::size_t>(n)] = std::pow(rho, n) * norm;
  check_normalised(d.probs);
  return d;
}

double mm1b_blocking(double rho, int B) { return mm1b_dist(rho, B).probs.back(); }

double power_law_loss_gap(double rho, int B) {
  check_inputs(rho, B);
  return std::pow(rho, B) - mm1b_blocking(rho, B);
}

QueueDist md1b_dist(double rho, int B) {
  check_inputs(rho, B);

  // Poisson(rho) arrival counts during one deterministic service.
  std::vector<double> a(static_cast<std::size_t>(B) + 1);
  a[0] = std::exp(-rho);
  for (int k = 1; k <= B; ++k) a[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k - 1)] * rho / k;

  // Departure-epoch chain on occupancies 0..B-1 left behind by a departure.
  // From state i >= 1 the next departure leaves i-1 plus the arrivals accepted
  // during its service (at most B-i fit); from 0 it behaves like state 1 after
  // the arrival that restarts service.
  const int S = B;  // states 0..B-1
  auto transition = [&](int i, int j) -> double {
    const int eff = std::max(i, 1);
    const int room = B - eff;
    if (j < eff - 1 || j > B - 1) return 0.0;
    if (j - eff + 1 < room) return a[static_cast<std::size_t>(j - eff + 1)];
    // Top state absorbs the tail of the arrival distribution.
    double tail = 1.0;
    for (int k = 0; k < room; ++k) tail -= a[static_cast<std::size_t>(k)];
    return j == B - 1 ? std::max(tail, 0.0) : 0.0;
  };

  std::vector<double> pi(static_cast<std::size_t>(S), 1.0 / S), nxt(static_cast<std::size_t>(S));
  double delta = 1.0;
  for (int it = 0; it < 200000 && delta > 1e-13; ++it) {
    for (int j = 0; j < S; ++j) {
      double s = 0.0;
      for (int i = 0; i < S; ++i) s += pi[static_cast<std::size_t>(i)] * transition(i, j);
      nxt[static_cast<std::size_t>(j)] = s;
    }
    delta = 0.0;
    double norm = 0.0;
    for (double x : nxt) norm += x;
    for (int j = 0; j < S; ++j) {
      nxt[static_cast<std::size_t>(j)] /= norm;
      delta = std::max(delta, std::abs(nxt[static_cast<std::size_t>(j)] - pi[static_cast<std::size_t>(j)]));
    }
    pi.swap(nxt);
  }
  if (delta > 1e-13) throw NumericError("md1b_dist: power iteration did not converge");

  // Finite-buffer correction from departure-epoch to time-stationary
  // occupancy: p_n = pi_n/(pi_0 + rho) for n < B and p_B = 1 - 1/(pi_0 + rho).
  QueueDist d;
  d.rho = rho;
  d.buffer = B;
  d.probs.resize(static_cast<std::size_t>(B) + 1);
  const double denom = pi[0] + rho;
  for (int n = 0; n < B; ++n) d.probs[static_cast<std::size_t>(n)] = pi[static_cast<std::size_t>(n)] / denom;
  d.probs[static_cast<std::size_t>(B)] = std::max(1.0 - 1.0 / denom, 0.0);
  for (double& x : d.probs) x = std::max(x, 0.0);
  check_normalised(d.probs);
  return d;
}

}  // namespace tcpfluid
