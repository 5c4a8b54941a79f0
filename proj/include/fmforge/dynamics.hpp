#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "fmforge/modes.hpp"
#include "fmforge/pulse.hpp"

namespace fmforge {

using Complex = std::complex<double>;

// Ion pair a gate acts on, 0-based.
struct IonPair {
  int first = 0;
  int second = 1;
};

// Per-mode, per-segment detunings and accumulated phases at segment boundaries.
struct PhaseTable {
  int n_seg = 0;
  double dt = 0.0;
  double duration = 0.0;
  std::vector<std::vector<double>> detuning;        // [mode][segment]
  std::vector<std::vector<double>> boundary_phase;  // [mode][0..n_seg]
};

PhaseTable phase_table(const DiscretePulse& pulse, const ModeStructure& modes,
                       std::span<const double> offsets = {});

// Mode integrals at unit Rabi frequency with the Lamb-Dicke factor pulled out:
//   alpha_k^j        = (Omega/2) eta[k][j] * disp[k]
//   alpha_avg_k^j    = (Omega/2) eta[k][j] * avg[k]
//   Theta            = -(Omega^2/2) sum_k eta[k][j1] eta[k][j2] * theta_im[k]
struct ModeIntegrals {
  std::vector<Complex> disp;      // int_0^tau exp(-i theta_k)
  std::vector<Complex> avg;       // (1/tau) int int exp(-i theta_k)
  std::vector<double> theta_im;   // Im of the ordered double integral
};

ModeIntegrals mode_integrals(const PhaseTable& pt);

// Parameter Jacobians of the same integrals, [mode][segment].
struct ModeIntegralGradients {
  std::vector<std::vector<Complex>> disp;
  std::vector<std::vector<Complex>> avg;
  std::vector<std::vector<double>> theta_im;
};

ModeIntegralGradients mode_integral_gradients(const PhaseTable& pt, bool want_disp,
                                              bool want_avg, bool want_theta);

// Displacements, time-averaged displacements, rotation angle, gradients.
// Offsets default to nominal operation (all zero).
std::vector<Complex> displacement(const DiscretePulse& pulse, const ModeStructure& modes,
                                  int ion, double omega,
                                  std::span<const double> offsets = {});
std::vector<Complex> avg_displacement(const DiscretePulse& pulse, const ModeStructure& modes,
                                      int ion, double omega,
                                      std::span<const double> offsets = {});
double rotation_angle(const DiscretePulse& pulse, const ModeStructure& modes, IonPair pair,
                      double omega, std::span<const double> offsets = {});

std::vector<std::vector<Complex>> grad_displacement(const DiscretePulse& pulse,
                                                    const ModeStructure& modes, int ion,
                                                    double omega,
                                                    std::span<const double> offsets = {});
std::vector<std::vector<Complex>> grad_avg_displacement(const DiscretePulse& pulse,
                                                        const ModeStructure& modes, int ion,
                                                        double omega,
                                                        std::span<const double> offsets = {});
std::vector<double> grad_rotation_angle(const DiscretePulse& pulse,
                                        const ModeStructure& modes, IonPair pair,
                                        double omega, std::span<const double> offsets = {});

// Everything the cost and fidelity functions need, from one phase table.
struct GateOutcome {
  std::array<std::vector<Complex>, 2> alpha;      // [pair ion][mode]
  std::array<std::vector<Complex>, 2> alpha_avg;  // [pair ion][mode]
  double theta = 0.0;                             // rad
  double omega = 0.0;                             // rad/s

  double displacement_error() const;  // sum_k sum_j |alpha|^2
  double avg_displacement_error() const;
};

GateOutcome gate_outcome(const DiscretePulse& pulse, const ModeStructure& modes,
                         IonPair pair, double omega, std::span<const double> offsets = {});
GateOutcome gate_outcome(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                         double omega, std::span<const double> offsets = {});

// Serial O(n_seg^2) reference implementations, kept for tests and benchmarks.
double rotation_angle_naive(const DiscretePulse& pulse, const ModeStructure& modes,
                            IonPair pair, double omega,
                            std::span<const double> offsets = {});
std::vector<double> grad_rotation_angle_naive(const DiscretePulse& pulse,
                                              const ModeStructure& modes, IonPair pair,
                                              double omega,
                                              std::span<const double> offsets = {});

// Realize a pulse as a stepwise-constant profile (identity for discrete).
DiscretePulse as_discrete(const Pulse& pulse);

}  // namespace fmforge
