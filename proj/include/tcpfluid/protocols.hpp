#pragma once

#include <string>
#include <vector>

#include "tcpfluid/errors.hpp"

namespace tcpfluid {

enum class ProtocolKind { compound, reno, hstcp };

/// Monotone piecewise log-linear function of the window size: linear
/// interpolation in (log w, log f) between breakpoints.  Used for the
/// HighSpeed TCP response tables.  No extrapolation: querying outside
/// [w.front(), w.back()] is a domain error.
struct LogLinearTable {
  std::vector<double> w;  // breakpoint abscissae, strictly increasing, > 0
  std::vector<double> f;  // breakpoint values, > 0

  double value(double x) const;
  // In-segment analytic derivative; at a breakpoint returns the right-hand
  // derivative.
  double derivative(double x) const;
  double w_min() const { return w.front(); }
  double w_max() const { return w.back(); }
  bool contains(double x) const { return !w.empty() && x >= w.front() && x <= w.back(); }

  // unit_interval additionally demands values in (0,1).
  void validate(const std::string& name, bool unit_interval) const;

 private:
  std::size_t segment(double x) const;
};

/// Window increase/decrease gain description for one TCP flavour.
/// Immutable after construction; all operations on it are pure.
struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::compound;

  // Compound parameters (ignored for the other kinds).
  double alpha = 0.125;
  double beta = 0.5;
  double k = 0.75;

  // HighSpeed response tables (ignored for the other kinds).
  LogLinearTable f1;
  LogLinearTable f2;

  static ProtocolSpec compound(double alpha, double beta, double k);
  static ProtocolSpec compound_default() { return compound(0.125, 0.5, 0.75); }
  static ProtocolSpec reno();
  static ProtocolSpec hstcp(LogLinearTable f1, LogLinearTable f2);
};

// Per-ACK window increase i(w), in packets.
double increase_gain(const ProtocolSpec& spec, double w);
// Per-loss window decrease d(w), in packets.
double decrease_gain(const ProtocolSpec& spec, double w);
// d i / d w (packets^-1).
double increase_gain_deriv(const ProtocolSpec& spec, double w);
// d d / d w (dimensionless).
double decrease_gain_deriv(const ProtocolSpec& spec, double w);

}  // namespace tcpfluid
