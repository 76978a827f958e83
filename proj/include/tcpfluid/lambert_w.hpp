#pragma once

#include <complex>

namespace tcpfluid {

/// Principal branch W0 of the Lambert W function on the complex plane,
/// computed by Halley iteration from a region-dependent seed.  On the real
/// axis below -1/e the value with nonnegative imaginary part is returned
/// (continuation from above the branch cut).  Throws NumericError if the
/// iteration has not converged after 100 steps.
std::complex<double> lambert_w0(std::complex<double> z);

}  // namespace tcpfluid
