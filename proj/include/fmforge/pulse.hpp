#pragma once

#include <span>
#include <variant>
#include <vector>

#include "fmforge/modes.hpp"

namespace fmforge {

// Stepwise-constant drive-frequency profile over equal-width segments.
struct DiscretePulse {
  std::vector<double> segment_freqs;  // mu_n, rad/s
  double duration = 0.0;              // tau, s
  bool symmetric = false;

  int n_segments() const { return static_cast<int>(segment_freqs.size()); }
  double dt() const { return duration / n_segments(); }
};

// Smoothed profile: plateau values at segment midpoints, half-cosine ramps
// across a one-segment-wide window centered on each internal boundary.
struct ContinuousPulse {
  std::vector<double> step_freqs;  // plateau values, rad/s
  double duration = 0.0;
  int substeps = 20;  // fine steps per segment when discretized
  bool symmetric = false;

  int n_segments() const { return static_cast<int>(step_freqs.size()); }
};

using Pulse = std::variant<DiscretePulse, ContinuousPulse>;

double pulse_duration(const Pulse& p);
bool pulse_symmetric(const Pulse& p);

// Drive frequency at time t in [0, tau]. Throws ConfigError outside the pulse.
double sample_drive(const DiscretePulse& pulse, double t);
double sample_drive(const ContinuousPulse& pulse, double t);
double sample_drive(const Pulse& pulse, double t);

// Fine stepwise-constant pulse with n_segments * substeps equal steps, each
// step holding the continuous profile's value at the step midpoint.
DiscretePulse discretize_continuous(const ContinuousPulse& pulse);

// Mirror ceil(n_seg/2) free values into a palindromic list of length n_seg.
std::vector<double> expand_symmetric(std::span<const double> half_params, int n_seg);

// Inverse of expand_symmetric: average mirrored pairs.
std::vector<double> fold_symmetric(std::span<const double> full, int n_seg);

// Default segment count for a given duration: 16 segments per 200 us.
int default_segments(double duration);

// Allowed parameter range for the drive frequency, a margin around the
// sideband band. Optimizers clamp into this window.
struct FrequencyWindow {
  double lo = 0.0;
  double hi = 0.0;

  static FrequencyWindow around_modes(const ModeStructure& modes,
                                      double margin = kTwoPi * 50e3);
  double clamp(double f) const;
  double width() const { return hi - lo; }
};

}  // namespace fmforge
