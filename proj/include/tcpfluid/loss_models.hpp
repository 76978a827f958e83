#pragma once

#include <variant>

#include "tcpfluid/errors.hpp"

namespace tcpfluid {

/// Equilibrium loss probability of a small Drop-Tail buffer, modelled as the
/// utilisation power law p(w) = (w / (C tau))^B.
struct DropTailSmallBuffer {
  double capacity_per_flow = 0.0;  // packets/second
  double buffer_pkts = 0.0;        // >= 1; real-valued so buffer sweeps can bisect on it
  double rtt_s = 0.0;              // seconds
};

/// Loss probability of a queue fed by controlled long flows plus an
/// uncontrolled Gaussian short-flow load:
/// p(w) = exp(-2B (C tau - w - v tau) / (w sigma1^2 + v sigma2^2 tau)).
struct GaussianMixedTraffic {
  double capacity_per_flow = 0.0;  // packets/second
  double buffer_pkts = 0.0;
  double rtt_s = 0.0;
  double v = 0.0;          // mean short-flow load, packets/second, in [0, C)
  double sigma1_sq = 1.0;  // long-flow variance coefficient, packets
  double sigma2_sq = 1.0;  // short-flow variance coefficient, packets
};

using LossModel = std::variant<DropTailSmallBuffer, GaussianMixedTraffic>;

struct LossValue {
  double p = 0.0;
  bool overload = false;  // set when the formula gave >= 1 and was saturated
};

void validate(const DropTailSmallBuffer& m);
void validate(const GaussianMixedTraffic& m);
void validate(const LossModel& m);

LossValue loss_prob(const LossModel& model, double w);
double loss_prob_deriv(const LossModel& model, double w);

// Round trip time carried by the model (seconds).
double loss_rtt(const LossModel& model);
double loss_buffer(const LossModel& model);
// Largest window with sub-unit loss: C*tau for Drop-Tail, (C - v)*tau for the
// Gaussian model (open interval end in that case).
double window_upper_bound(const LossModel& model);

}  // namespace tcpfluid
