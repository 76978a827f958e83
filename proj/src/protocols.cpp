#include "tcpfluid/protocols.hpp"

#include <algorithm>
#include <cmath>

namespace tcpfluid {

void LogLinearTable::validate(const std::string& name, bool unit_interval) const {
  if (w.size() < 2 || w.size() != f.size())
    throw DomainError(name + ": table needs >= 2 breakpoints with matching value column");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) throw DomainError(name + ": breakpoint abscissae must be positive");
    if (i > 0 && !(w[i] > w[i - 1]))
      throw DomainError(name + ": breakpoint abscissae must be strictly increasing");
    if (!(f[i] > 0.0)) throw DomainError(name + ": values must be positive");
    if (unit_interval && !(f[i] < 1.0)) throw DomainError(name + ": values must lie in (0,1)");
  }
}

std::size_t LogLinearTable::segment(double x) const {
  if (w.empty() || x < w.front() || x > w.back())
    throw DomainError("window outside table domain (no extrapolation)");
  // Right-hand segment at interior breakpoints, last segment at the right end.
  auto it = std::upper_bound(w.begin(), w.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - w.begin());
  if (hi == w.size()) --hi;
  if (hi == 0) ++hi;
  return hi - 1;
}

double LogLinearTable::value(double x) const {
  const std::size_t s = segment(x);
  const double slope = (std::log(f[s + 1]) - std::log(f[s])) / (std::log(w[s + 1]) - std::log(w[s]));
  return f[s] * std::exp(slope * (std::log(x) - std::log(w[s])));
}

double LogLinearTable::derivative(double x) const {
  const std::size_t s = segment(x);
  const double slope = (std::log(f[s + 1]) - std::log(f[s])) / (std::log(w[s + 1]) - std::log(w[s]));
  // d/dx exp(log f_s + slope (log x - log w_s)) = f(x) slope / x
  return value(x) * slope / x;
}

ProtocolSpec ProtocolSpec::compound(double alpha, double beta, double k) {
  if (!(alpha > 0.0)) throw DomainError("compound: alpha must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("compound: beta must be in (0,1)");
  if (!(k > 0.0 && k < 2.0)) throw DomainError("compound: k must be in (0,2)");
  ProtocolSpec s;
  s.kind = ProtocolKind::compound;
  s.alpha = alpha;
  s.beta = beta;
  s.k = k;
  return s;
}

ProtocolSpec ProtocolSpec::reno() {
  ProtocolSpec s;
  s.kind = ProtocolKind::reno;
  return s;
}

ProtocolSpec ProtocolSpec::hstcp(LogLinearTable f1, LogLinearTable f2) {
  f1.validate("hstcp f1", false);
  f2.validate("hstcp f2", true);
  ProtocolSpec s;
  s.kind = ProtocolKind::hstcp;
  s.f1 = std::move(f1);
  s.f2 = std::move(f2);
  return s;
}

namespace {
void check_window(const ProtocolSpec& spec, double w) {
  if (!(w > 0.0)) throw DomainError("window must be positive");
  if (spec.kind == ProtocolKind::hstcp && (!spec.f1.contains(w) || !spec.f2.contains(w)))
    throw DomainError("window outside table domain (no extrapolation)");
}
}  // namespace

double increase_gain(const ProtocolSpec& spec, double w) {
  check_window(spec, w);
  switch (spec.kind) {
    case ProtocolKind::compound: return spec.alpha * std::pow(w, spec.k) / w;
    case ProtocolKind::reno: return 1.0 / w;
    case ProtocolKind::hstcp: return spec.f1.value(w) / w;
  }
  throw DomainError("unknown protocol kind");
}

double decrease_gain(const ProtocolSpec& spec, double w) {
  check_window(spec, w);
  switch (spec.kind) {
    case ProtocolKind::compound: return spec.beta * w;
    case ProtocolKind::reno: return 0.5 * w;
    case ProtocolKind::hstcp: return spec.f2.value(w) * w;
  }
  throw DomainError("unknown protocol kind");
}

double increase_gain_deriv(const ProtocolSpec& spec, double w) {
  check_window(spec, w);
  switch (spec.kind) {
    case ProtocolKind::compound: return spec.alpha * (spec.k - 1.0) * std::pow(w, spec.k - 2.0);
    case ProtocolKind::reno: return -1.0 / (w * w);
    case ProtocolKind::hstcp:
      return spec.f1.derivative(w) / w - spec.f1.value(w) / (w * w);
  }
  throw DomainError("unknown protocol kind");
}

double decrease_gain_deriv(const ProtocolSpec& spec, double w) {
  check_window(spec, w);
  switch (spec.kind) {
    case ProtocolKind::compound: return spec.beta;
    case ProtocolKind::reno: return 0.5;
    case ProtocolKind::hstcp: return spec.f2.derivative(w) * w + spec.f2.value(w);
  }
  throw DomainError("unknown protocol kind");
}

}  // namespace tcpfluid
