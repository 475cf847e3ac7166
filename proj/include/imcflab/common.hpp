#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace imcf {

// Thrown for every rejected input; the CLI maps it to exit code 2.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kPi = 3.14159265358979323846;

// C2 smoothstep 6x^5 - 15x^4 + 10x^3 on [0,1], clamped outside.
inline double smoothstep(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  return x * x * x * (x * (6 * x - 15) + 10);
}
inline double smoothstep_d1(double x) {
  if (x <= 0 || x >= 1) return 0;
  return 30 * x * x * (x - 1) * (x - 1);
}
inline double smoothstep_d2(double x) {
  if (x <= 0 || x >= 1) return 0;
  return 60 * x * (x - 1) * (2 * x - 1);
}
// Antiderivative of smoothstep with value 0 at x <= 0.
inline double smoothstep_int(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return x - 0.5;
  double x2 = x * x;
  return x2 * x2 * (x * (x - 3) + 2.5);
}

inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  return a - kPi;
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError(msg);
}

}  // namespace imcf
