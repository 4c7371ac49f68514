#pragma once

#include <complex>
#include <vector>

namespace hisac {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// Exact by definition; keeping it exact makes results reproducible across builds.
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Reduce an angle into [0, 2*pi).
double wrap_angle(double radians);

// Signed angular distance in (-pi, pi].
double angle_difference(double a, double b);

}  // namespace hisac
