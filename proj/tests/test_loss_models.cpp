#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tcpfluid/loss_models.hpp"

using namespace tcpfluid;

namespace {

DropTailSmallBuffer droptail(double cap_tau, double B, double tau = 1.0) {
  return {cap_tau / tau, B, tau};
}

GaussianMixedTraffic gaussian(double C, double B, double tau, double v, double s1, double s2) {
  return {C, B, tau, v, s1, s2};
}

}  // namespace

TEST_CASE("droptail basic values") {
  const LossModel m = droptail(1000.0, 15.0);
  const auto full = loss_prob(m, 1000.0);
  CHECK(full.p == doctest::Approx(1.0));
  CHECK(full.overload);

  const LossModel m2 = droptail(1000.0, 2.0);
  const auto half = loss_prob(m2, 500.0);
  CHECK(half.p == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_FALSE(half.overload);
  CHECK(loss_prob_deriv(m2, 500.0) == doctest::Approx(0.001).epsilon(1e-14));
}

TEST_CASE("gaussian basic values") {
  const GaussianMixedTraffic g = gaussian(1000.0, 10.0, 0.1, 200.0, 1.5, 2.5);
  const LossModel m = g;
  // Zero headroom: w = (C - v) tau.
  const double edge = (g.capacity_per_flow - g.v) * g.rtt_s;
  CHECK(loss_prob(m, edge).p == doctest::Approx(1.0));
  CHECK(loss_prob(m, edge).overload);
  const auto mid = loss_prob(m, 0.5 * edge);
  CHECK(mid.p > 0.0);
  CHECK(mid.p < 1.0);
  CHECK_FALSE(mid.overload);
}

TEST_CASE("domain errors and validation") {
  const LossModel m = droptail(1000.0, 2.0);
  CHECK_THROWS_AS(loss_prob(m, 0.0), DomainError);
  CHECK_THROWS_AS(loss_prob(m, -3.0), DomainError);
  CHECK_THROWS_AS(validate(DropTailSmallBuffer{0.0, 2.0, 0.1}), DomainError);
  CHECK_THROWS_AS(validate(DropTailSmallBuffer{100.0, 0.5, 0.1}), DomainError);
  CHECK_THROWS_AS(validate(GaussianMixedTraffic{100.0, 2.0, 0.1, 100.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(GaussianMixedTraffic{100.0, 2.0, 0.1, 10.0, 0.0, 1.0}), DomainError);
}

TEST_CASE("monotonicity in w and buffer size") {
  const LossModel m = droptail(1000.0, 8.0);
  double prev = 0.0;
  for (double w = 1.0; w < 1000.0; w *= 1.3) {
    const double p = loss_prob(m, w).p;
    CHECK(p > prev);
    prev = p;
  }
  // Larger B means smaller p below capacity.
  CHECK(loss_prob(droptail(1000.0, 20.0), 600.0).p < loss_prob(droptail(1000.0, 10.0), 600.0).p);

  const LossModel g = gaussian(1000.0, 10.0, 0.1, 200.0, 1.5, 2.5);
  prev = 0.0;
  for (double w = 1.0; w < 80.0 * 0.999; w *= 1.2) {
    const double p = loss_prob(g, w).p;
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("dimensional co-scaling leaves p unchanged") {
  // (tau, C) -> (s tau, C/s), exact for Drop-Tail with binary s.
  const double s = 2.0;
  const DropTailSmallBuffer base{1250.0, 7.0, 0.08};
  const DropTailSmallBuffer scaled{base.capacity_per_flow / s, 7.0, base.rtt_s * s};
  for (double w = 1.0; w < 99.0; w *= 1.7)
    CHECK(loss_prob(LossModel{base}, w).p == loss_prob(LossModel{scaled}, w).p);

  // Gaussian: v co-scales to v/s, variance coefficients unchanged.
  const GaussianMixedTraffic gb = gaussian(1000.0, 10.0, 0.1, 200.0, 1.5, 2.5);
  GaussianMixedTraffic gs = gb;
  gs.rtt_s *= s;
  gs.capacity_per_flow /= s;
  gs.v /= s;
  for (double w = 1.0; w < 79.0; w *= 1.6) {
    CHECK(loss_prob(LossModel{gb}, w).p ==
          doctest::Approx(loss_prob(LossModel{gs}, w).p).epsilon(1e-14));
    CHECK(loss_prob_deriv(LossModel{gb}, w) ==
          doctest::Approx(loss_prob_deriv(LossModel{gs}, w)).epsilon(1e-14));
  }
}

TEST_CASE("derivatives match central finite differences on a log grid") {
  const LossModel dt = droptail(1000.0, 12.0);
  for (double w = 1.0; w < 990.0; w *= 1.45) {
    const double fd = oracles::central_diff([&](double x) { return loss_prob(dt, x).p; }, w);
    CHECK(loss_prob_deriv(dt, w) == doctest::Approx(fd).epsilon(1e-6));
  }
  const LossModel g = gaussian(1000.0, 10.0, 0.1, 200.0, 1.5, 2.5);
  for (double w = 1.0; w < 79.0; w *= 1.45) {
    const double fd = oracles::central_diff([&](double x) { return loss_prob(g, x).p; }, w);
    CHECK(loss_prob_deriv(g, w) == doctest::Approx(fd).epsilon(1e-6));
  }
  // v = 0, sigma1^2 = 1 reduces p' to p * 2 B C tau / w^2.
  const GaussianMixedTraffic g0 = gaussian(1000.0, 10.0, 0.1, 0.0, 1.0, 2.5);
  const LossModel gm = g0;
  for (double w = 1.0; w < 99.0; w *= 1.6) {
    const double expected = loss_prob(gm, w).p * 2.0 * g0.buffer_pkts * g0.capacity_per_flow *
                            g0.rtt_s / (w * w);
    CHECK(loss_prob_deriv(gm, w) == doctest::Approx(expected).epsilon(1e-12));
    const double fd = oracles::central_diff([&](double x) { return loss_prob(gm, x).p; }, w);
    CHECK(loss_prob_deriv(gm, w) == doctest::Approx(fd).epsilon(1e-6));
  }
}
