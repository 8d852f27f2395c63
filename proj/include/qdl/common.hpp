#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdl {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A contract violation by the caller (malformed input, theorem hypothesis not met).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure did not reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Tolerances shared across the pipeline. Defaults are the documented ones;
// the CLI exposes each as a flag and echoes the effective values.
struct Tolerances {
  double root_residual = 1e-12;    // root finder stopping rule, relative
  double cluster = 1e-6;           // root clustering, relative to root scale
  double modulus_rel = 1e-9;       // equality of critical-value moduli
  double level_guard = 1e-6;       // regular levels must avoid critical moduli
  double trace = 1e-3;             // relative level error on chord midpoints
  double step_min = 1e-5;          // arc-length step bounds of the tracer
  double step_max = 1e-1;
  double launch_factor = 1e-4;     // launch radius / local critical separation
  double capture_factor = 10.0;    // capture radius / launch radius
  double angle_snap_deg = 2.0;     // corner angles snap window
  double map_accuracy = 1e-6;      // disk map accuracy, relative to diameter
  double fingerprint = 1e-3;       // theorem residual threshold
  int samples = 1024;              // boundary samples for conformal maps
};

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

// Lifts a sequence of angles so that consecutive differences lie in (-pi, pi].
inline std::vector<double> unwrap(const std::vector<double>& angles) {
  std::vector<double> out(angles.size());
  if (angles.empty()) return out;
  out[0] = angles[0];
  for (std::size_t i = 1; i < angles.size(); ++i)
    out[i] = out[i - 1] + wrap_angle(angles[i] - angles[i - 1]);
  return out;
}

}  // namespace qdl
