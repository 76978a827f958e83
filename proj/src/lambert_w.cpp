#include "tcpfluid/lambert_w.hpp"

#include <cmath>
#include <limits>

#include "tcpfluid/errors.hpp"

namespace tcpfluid {

namespace {

using cplx = std::complex<double>;

cplx initial_guess(cplx z) {
  constexpr double inv_e = 0.36787944117144233;
  // Series around the branch point z = -1/e: W = -1 + p - p^2/3 + 11 p^3/72,
  // p = sqrt(2 (e z + 1)).  The principal square root selects W0 (values with
  // Im >= 0 on the cut).
  if (std::abs(z + cplx(inv_e, 0.0)) < 0.4) {
    const cplx p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  }
  if (std::abs(z) < 0.5) return z * (1.0 - z + 1.5 * z * z);
  if (std::abs(z) > 3.0) {
    const cplx l1 = std::log(z);
    const cplx l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
  }
  // Moderate |z|: log(1+z) tracks W0 well enough for Halley to take over,
  // except close to z = -1 where the argument nears zero.
  if (std::abs(z + cplx(1.0, 0.0)) < 0.25) return cplx(0.2, 1.3);
  return std::log(1.0 + z);
}

}  // namespace

std::complex<double> lambert_w0(std::complex<double> z) {
  if (z == cplx(0.0, 0.0)) return z;
  // Map the cut convention: real z below -1/e resolves to Im >= 0.
  if (z.imag() == 0.0 && std::signbit(z.imag())) z = cplx(z.real(), 0.0);

  cplx w = initial_guess(z);
  cplx best = w;
  double best_resid = std::numeric_limits<double>::infinity();
  const double target = 1e-13 * std::max(1.0, std::abs(z));
  for (int it = 0; it < 100; ++it) {
    const cplx ew = std::exp(w);
    const cplx f = w * ew - z;
    const double resid = std::abs(f);
    if (resid < best_resid) {
      best_resid = resid;
      best = w;
    }
    if (resid <= target) break;
    const cplx wp1 = w + 1.0;
    // Halley step; falls back to Newton when the divisor degenerates.
    cplx denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == cplx(0.0, 0.0)) denom = ew * wp1;
    const cplx dw = f / denom;
    const cplx next = w - dw;
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
    w = next;
    if (std::abs(dw) <= 4e-16 * (1.0 + std::abs(w))) break;
  }
  if (!(best_resid <= 1e-11 * std::max(1.0, std::abs(z))))
    throw NumericError("lambert_w0: no convergence after 100 iterations");
  w = best;
  // Two clean-up Newton steps tighten the residual to rounding level.
  for (int it = 0; it < 2; ++it) {
    const cplx e2 = std::exp(w);
    const cplx r = w * e2 - z;
    const cplx d2 = e2 * (w + 1.0);
    if (d2 == cplx(0.0, 0.0)) break;
    const cplx next = w - r / d2;
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
    w = next;
  }
  return w;
}

}  // namespace tcpfluid
