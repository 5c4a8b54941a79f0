#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fmforge/dynamics.hpp"
#include "fmforge/modes.hpp"
#include "fmforge/pulse.hpp"
#include "fmforge/rng.hpp"

namespace fmforge {

enum class PulseKind { kDiscrete, kContinuous };

// Maps the optimizer's free parameters to a stepwise-constant pulse and pulls
// segment-space gradients back to parameter space. Handles the symmetric
// (palindromic) constraint and the cosine-envelope substep expansion.
class PulseParametrization {
 public:
  PulseParametrization(PulseKind kind, int n_seg, double duration, bool symmetric,
                       int substeps = 20);

  int n_free() const { return n_free_; }
  int n_seg() const { return n_seg_; }
  double duration() const { return duration_; }
  bool symmetric() const { return symmetric_; }
  PulseKind kind() const { return kind_; }

  // Fine stepwise-constant realization used by the dynamics kernels.
  DiscretePulse realize(std::span<const double> free_params) const;

  // User-facing pulse value (discrete or continuous).
  Pulse to_pulse(std::span<const double> free_params) const;

  // Free parameters recovered from a pulse of matching shape.
  std::vector<double> from_pulse(const Pulse& pulse) const;

  // Chain rule: gradient w.r.t. fine segment values -> w.r.t. free parameters.
  std::vector<double> pullback(std::span<const double> grad_fine) const;

 private:
  PulseKind kind_;
  int n_seg_;
  double duration_;
  bool symmetric_;
  int substeps_;
  int n_free_;

  std::vector<double> expand(std::span<const double> free_params) const;  // length n_seg
};

PulseParametrization parametrization_of(const Pulse& pulse);

// Offsets drawn iid from N(0, uncertainty) per mode.
enum class SampleRole { kTraining, kBatch, kCrossValidation, kTest };

struct SampleSet {
  std::vector<std::vector<double>> offsets;  // [sample][mode], rad/s
  SampleRole role = SampleRole::kTest;
  double uncertainty = 0.0;  // rad/s
  std::uint64_t seed = 0;    // tag of the stream that produced the set
};

SampleSet sample_offsets(double uncertainty, int n_modes, int count, RngStream stream,
                         SampleRole role = SampleRole::kTest);

// Rabi frequency calibration: Omega such that |Theta(tau, 0)| = pi/4, plus the
// sign the cost and fidelity target (Omega^2 rescaling cannot flip Theta).
struct Calibration {
  double omega = 0.0;
  double angle_sign = 1.0;
  double theta_unit = 0.0;  // Theta(tau, 0) at Omega = 1
};

Calibration calibrate_omega(const DiscretePulse& pulse, const ModeStructure& modes,
                            IonPair pair);
Calibration calibrate_omega(const Pulse& pulse, const ModeStructure& modes, IonPair pair);

// C(eps) = sum_k (|alpha_k^j1|^2 + |alpha_k^j2|^2) + (Theta - s pi/4)^2 / 2
double cost_sample(const GateOutcome& outcome, double angle_sign = 1.0);

struct CostReport {
  double total = 0.0;
  double displacement_term = 0.0;
  double angle_term = 0.0;
  double omega = 0.0;  // calibrated Rabi frequency used for this evaluation
  std::vector<double> per_sample;
};

struct ValueGrad {
  double value = 0.0;
  std::vector<double> grad;  // over free pulse parameters
};

// Mean of cost_sample over the sample set at the per-iteration calibrated
// Omega; the gradient includes the dependence of Omega on the pulse.
ValueGrad cost_batch(const PulseParametrization& par, std::span<const double> free_params,
                     const ModeStructure& modes, IonPair pair, const SampleSet& samples,
                     bool displacement_only = false, CostReport* report = nullptr);

// sum_k sum_j |alpha_k^j(tau, 0)|^2 at Omega = 1.
ValueGrad nonrobust_cost(const PulseParametrization& par, std::span<const double> free_params,
                         const ModeStructure& modes, IonPair pair);

// sum_k sum_j |alpha_avg|^2 at Omega = 1; requires a symmetric parametrization.
ValueGrad robust_cost(const PulseParametrization& par, std::span<const double> free_params,
                      const ModeStructure& modes, IonPair pair);

// Appendix-style dephasing metric: mean over the set of
// sum_k (|alpha_avg_k^j1|^2 + |alpha_avg_k^j2|^2) at the calibrated Omega.
double avg_displacement_cost(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                             const SampleSet& test_set);

struct FidelityConfig {
  std::vector<double> nbar;  // per mode; empty = 0.5 everywhere

  double nbar_at(int k) const { return nbar.empty() ? 0.5 : nbar[k]; }
};

// Second-order fidelity F = cos(Theta - s pi/4) [1 - sum |alpha|^2 (nbar + 1/2)].
double fidelity(const GateOutcome& outcome, const FidelityConfig& fcfg = {},
                double angle_sign = 1.0);

}  // namespace fmforge
