#include <cmath>

#include "fmforge/dynamics.hpp"
#include "fmforge/errors.hpp"
#include "fmforge/kernels.hpp"

// Quadratic-time rotation-angle evaluation by explicit double sum over segment
// pairs. Slower than the prefix-sum path but independent of it; tests require
// agreement to 1e-12 and the benchmark compares the two.

namespace fmforge {

namespace {

const Complex kI(0.0, 1.0);

// (delta dt - sin(delta dt)) / delta^2, the diagonal triangle term.
double triangle_term(double delta, double dt) {
  const double x = delta * dt;
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return dt * dt * x * (1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0);
  }
  return (x - std::sin(x)) / (delta * delta);
}

// d/d delta of triangle_term.
double triangle_term_deriv(double delta, double dt) {
  const double x = delta * dt;
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return dt * dt * dt * (1.0 / 6.0 - x2 / 40.0 + x2 * x2 / 1008.0);
  }
  return (dt - dt * std::cos(x)) / (delta * delta) -
         2.0 * (x - std::sin(x)) / (delta * delta * delta);
}

}  // namespace

double rotation_angle_naive(const DiscretePulse& pulse, const ModeStructure& modes,
                            IonPair pair, double omega, std::span<const double> offsets) {
  if (pair.first == pair.second)
    throw ConfigError("rotation_angle_naive: pair must name two distinct ions");
  const PhaseTable pt = phase_table(pulse, modes, offsets);
  const int ns = pt.n_seg;
  const double dt = pt.dt;

  double total = 0.0;
  for (size_t k = 0; k < pt.detuning.size(); ++k) {
    double im = 0.0;
    for (int n = 0; n < ns; ++n) {
      const double dn = pt.detuning[k][n];
      const Complex an =
          std::exp(Complex(0.0, pt.boundary_phase[k][n])) * std::conj(kernels::e0(dn, dt));
      for (int m = 0; m < n; ++m) {
        const double dm = pt.detuning[k][m];
        const Complex cm =
            std::exp(Complex(0.0, -pt.boundary_phase[k][m])) * kernels::e0(dm, dt);
        im += (an * cm).imag();
      }
      im += triangle_term(dn, dt);
    }
    total += modes.lamb_dicke[k][pair.first] * modes.lamb_dicke[k][pair.second] * im;
  }
  return -0.5 * omega * omega * total;
}

std::vector<double> grad_rotation_angle_naive(const DiscretePulse& pulse,
                                              const ModeStructure& modes, IonPair pair,
                                              double omega, std::span<const double> offsets) {
  const PhaseTable pt = phase_table(pulse, modes, offsets);
  const int ns = pt.n_seg;
  const double dt = pt.dt;
  std::vector<double> grad(ns, 0.0);

  for (size_t k = 0; k < pt.detuning.size(); ++k) {
    const double w =
        -0.5 * omega * omega * modes.lamb_dicke[k][pair.first] * modes.lamb_dicke[k][pair.second];
    for (int n = 0; n < ns; ++n) {
      const double dn = pt.detuning[k][n];
      const Complex phn = std::exp(Complex(0.0, pt.boundary_phase[k][n]));
      const Complex an = phn * std::conj(kernels::e0(dn, dt));
      for (int m = 0; m < n; ++m) {
        const double dm = pt.detuning[k][m];
        const Complex phm = std::exp(Complex(0.0, -pt.boundary_phase[k][m]));
        const Complex cm = phm * kernels::e0(dm, dt);
        // mu_n moves A_n's detuning; mu_m moves C_m's; every mu_p with
        // m <= p < n advances the relative phase theta_n - theta_m.
        grad[n] += w * (kI * phn * std::conj(kernels::e1(dn, dt)) * cm).imag();
        grad[m] += w * (an * (-kI) * phm * kernels::e1(dm, dt)).imag();
        const double cross = w * (kI * dt * an * cm).imag();
        for (int p = m; p < n; ++p) grad[p] += cross;
      }
      grad[n] += w * triangle_term_deriv(dn, dt);
    }
  }
  return grad;
}

}  // namespace fmforge
