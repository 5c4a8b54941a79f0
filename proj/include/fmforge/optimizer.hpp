#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmforge/objectives.hpp"

namespace fmforge {

enum class Method { kNonrobust, kRobust, kSRobust, kBRobust };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// Full description of one optimization task.
struct ObjectiveSpec {
  Method method = Method::kBRobust;
  double uncertainty = 0.0;  // rad/s
  double duration = 200e-6;  // s
  PulseKind pulse_kind = PulseKind::kDiscrete;
  int n_segments = 0;  // 0 = default_segments(duration)
  int substeps = 20;
  int training_size = 100;
  int batch_size = 10;
  int iterations = -1;  // -1 = 300 for (non)robust, 1500 for s/b-robust
  int trials = 10;
  int cv_size = 200;
  bool continuous_displacement_only = true;
  std::uint64_t seed = 1;

  // Adaptive-moment step size in rad/s, with linear warmup. Large enough to
  // cross the sideband window within the iteration budget.
  double learning_rate = kTwoPi * 1.5e3;
  int warmup_iterations = 50;
  // Cosine step-size decay toward lr * floor over the run; 1.0 disables.
  // Large steps explore early, small steps settle the stochastic plateau.
  double lr_decay_floor = 0.02;
  double window_margin = kTwoPi * 50e3;

  int effective_iterations() const;
  int effective_segments() const;
  bool symmetric() const { return method == Method::kRobust; }
  bool displacement_only() const {
    return pulse_kind == PulseKind::kContinuous && continuous_displacement_only &&
           (method == Method::kSRobust || method == Method::kBRobust);
  }
  void validate() const;
};

// Adaptive moment estimation (bias-corrected first/second moments).
struct AdamState {
  std::vector<double> m, v;
  std::int64_t t = 0;
};

struct AdamParams {
  double lr = kTwoPi * 1.5e3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const AdamParams& hyper);

struct CurvePoint {
  int iter = 0;
  double cost = 0.0;
  double omega = 0.0;  // rad/s, calibrated at this iterate
  std::uint64_t batch_seed = 0;
};

struct TrialResult {
  int index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::vector<double> free_params;
  double omega = 0.0;
  double angle_sign = 1.0;
  double cv_score = 0.0;  // mean 1 - F over the cross-validation set
  std::vector<CurvePoint> curve;
  double wall_time_s = 0.0;
};

struct OptimizationRun {
  ObjectiveSpec spec;
  std::vector<TrialResult> trials;
  int selected_index = -1;
  Pulse selected;
  double omega = 0.0;
  double angle_sign = 1.0;
  double wall_time_s = 0.0;

  const std::vector<CurvePoint>& learning_curve() const {
    return trials[selected_index].curve;
  }
};

// One optimization trial with the trial's own RNG streams.
TrialResult run_trial(const ObjectiveSpec& spec, const ModeStructure& modes, IonPair pair,
                      int trial_index);

// Single-trial entry point (trial 0); throws on trial failure.
OptimizationRun optimize(const ObjectiveSpec& spec, const ModeStructure& modes,
                         IonPair pair);

// `spec.trials` independent trials from random starts, best cross-validation
// score wins (ties: lowest trial index).
OptimizationRun multi_trial(const ObjectiveSpec& spec, const ModeStructure& modes,
                            IonPair pair);

// Mean 1 - F over a sample set at the pulse's calibrated Omega.
double mean_infidelity(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                       const SampleSet& set, const FidelityConfig& fcfg = {});

}  // namespace fmforge
