#include "tcpfluid/loss_models.hpp"

#include <cmath>

namespace tcpfluid {

void validate(const DropTailSmallBuffer& m) {
  if (!(m.capacity_per_flow > 0.0)) throw DomainError("droptail: capacity_per_flow must be > 0");
  if (!(m.buffer_pkts >= 1.0)) throw DomainError("droptail: buffer_pkts must be >= 1");
  if (!(m.rtt_s > 0.0)) throw DomainError("droptail: rtt_s must be > 0");
}

void validate(const GaussianMixedTraffic& m) {
  if (!(m.capacity_per_flow > 0.0)) throw DomainError("gaussian: capacity_per_flow must be > 0");
  if (!(m.buffer_pkts >= 1.0)) throw DomainError("gaussian: buffer_pkts must be >= 1");
  if (!(m.rtt_s > 0.0)) throw DomainError("gaussian: rtt_s must be > 0");
  if (!(m.v >= 0.0 && m.v < m.capacity_per_flow))
    throw DomainError("gaussian: v must satisfy 0 <= v < capacity_per_flow");
  if (!(m.sigma1_sq > 0.0)) throw DomainError("gaussian: sigma1_sq must be > 0");
  if (!(m.sigma2_sq > 0.0)) throw DomainError("gaussian: sigma2_sq must be > 0");
}

void validate(const LossModel& m) {
  std::visit([](const auto& inner) { validate(inner); }, m);
}

namespace {

LossValue droptail_p(const DropTailSmallBuffer& m, double w) {
  const double util = w / (m.capacity_per_flow * m.rtt_s);
  if (util >= 1.0) return {1.0, true};
  return {std::pow(util, m.buffer_pkts), false};
}

LossValue gaussian_p(const GaussianMixedTraffic& m, double w) {
  const double headroom = m.capacity_per_flow * m.rtt_s - w - m.v * m.rtt_s;
  if (headroom <= 0.0) return {1.0, true};
  const double denom = w * m.sigma1_sq + m.v * m.sigma2_sq * m.rtt_s;
  return {std::exp(-2.0 * m.buffer_pkts * headroom / denom), false};
}

}  // namespace

LossValue loss_prob(const LossModel& model, double w) {
  if (!(w > 0.0)) throw DomainError("loss_prob: window must be positive");
  return std::visit(
      [w](const auto& m) -> LossValue {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DropTailSmallBuffer>) return droptail_p(m, w);
        else return gaussian_p(m, w);
      },
      model);
}

double loss_prob_deriv(const LossModel& model, double w) {
  if (!(w > 0.0)) throw DomainError("loss_prob_deriv: window must be positive");
  const LossValue lv = loss_prob(model, w);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DropTailSmallBuffer>) {
          return m.buffer_pkts / w * lv.p;
        } else {
          const double denom = w * m.sigma1_sq + m.v * m.sigma2_sq * m.rtt_s;
          const double num = m.v * m.sigma2_sq + (m.capacity_per_flow - m.v) * m.sigma1_sq;
          return lv.p * 2.0 * m.buffer_pkts * m.rtt_s * num / (denom * denom);
        }
      },
      model);
}

double loss_rtt(const LossModel& model) {
  return std::visit([](const auto& m) { return m.rtt_s; }, model);
}

double loss_buffer(const LossModel& model) {
  return std::visit([](const auto& m) { return m.buffer_pkts; }, model);
}

double window_upper_bound(const LossModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DropTailSmallBuffer>)
          return m.capacity_per_flow * m.rtt_s;
        else
          return (m.capacity_per_flow - m.v) * m.rtt_s;
      },
      model);
}

}  // namespace tcpfluid
