#pragma once

#include <cmath>
#include <complex>

namespace fmforge::kernels {

// Closed-form segment integrals for a constant detuning delta over [0, dt]:
//   e0 = int exp(-i delta t) dt
//   e1 = int t exp(-i delta t) dt
//   d0 = int_0^dt int_0^s exp(-i delta t) dt ds
//   d1 = int_0^dt int_0^s t exp(-i delta t) dt ds
// Each is dt^p * phi(z) with z = -i delta dt; the phi's switch to their power
// series for small |z| where the closed forms cancel catastrophically.

namespace detail {

inline constexpr double kSeriesRadius = 0.5;

// (e^z - 1)/z = sum z^m / (m+1)!
inline std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) > kSeriesRadius) return (std::exp(z) - 1.0) / z;
  std::complex<double> term = 1.0, sum = 1.0;
  for (int m = 1; m <= 18; ++m) {
    term *= z / static_cast<double>(m + 1);
    sum += term;
  }
  return sum;
}

// (e^z (z-1) + 1)/z^2 = sum (m+1) z^m / (m+2)!
inline std::complex<double> psi1(std::complex<double> z) {
  if (std::abs(z) > kSeriesRadius) return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
  std::complex<double> zp = 1.0, sum = 0.0;
  double fact = 2.0;  // (m+2)!
  for (int m = 0; m <= 18; ++m) {
    sum += (m + 1) / fact * zp;
    zp *= z;
    fact *= (m + 3);
  }
  return sum;
}

// (e^z - 1 - z)/z^2 = sum z^m / (m+2)!
inline std::complex<double> phi2(std::complex<double> z) {
  if (std::abs(z) > kSeriesRadius) return (std::exp(z) - 1.0 - z) / (z * z);
  std::complex<double> zp = 1.0, sum = 0.0;
  double fact = 2.0;
  for (int m = 0; m <= 18; ++m) {
    sum += zp / fact;
    zp *= z;
    fact *= (m + 3);
  }
  return sum;
}

// (e^z (z-2) + z + 2)/z^3 = sum (m+1) z^m / (m+3)!
inline std::complex<double> psi2(std::complex<double> z) {
  if (std::abs(z) > kSeriesRadius)
    return (std::exp(z) * (z - 2.0) + z + 2.0) / (z * z * z);
  std::complex<double> zp = 1.0, sum = 0.0;
  double fact = 6.0;  // (m+3)!
  for (int m = 0; m <= 18; ++m) {
    sum += (m + 1) / fact * zp;
    zp *= z;
    fact *= (m + 4);
  }
  return sum;
}

}  // namespace detail

inline std::complex<double> e0(double delta, double dt) {
  return dt * detail::phi1(std::complex<double>(0.0, -delta * dt));
}

inline std::complex<double> e1(double delta, double dt) {
  return dt * dt * detail::psi1(std::complex<double>(0.0, -delta * dt));
}

inline std::complex<double> d0(double delta, double dt) {
  return dt * dt * detail::phi2(std::complex<double>(0.0, -delta * dt));
}

inline std::complex<double> d1(double delta, double dt) {
  return dt * dt * dt * detail::psi2(std::complex<double>(0.0, -delta * dt));
}

}  // namespace fmforge::kernels
