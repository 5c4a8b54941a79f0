#include "fmforge/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "fmforge/errors.hpp"
#include "fmforge/parallel.hpp"

namespace fmforge {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::kNonrobust: return "nonrobust";
    case Method::kRobust: return "robust";
    case Method::kSRobust: return "s_robust";
    case Method::kBRobust: return "b_robust";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "nonrobust") return Method::kNonrobust;
  if (name == "robust") return Method::kRobust;
  if (name == "s_robust" || name == "s-robust") return Method::kSRobust;
  if (name == "b_robust" || name == "b-robust") return Method::kBRobust;
  throw ConfigError("unknown method '" + name + "'");
}

int ObjectiveSpec::effective_iterations() const {
  if (iterations >= 0) return iterations;
  return (method == Method::kNonrobust || method == Method::kRobust) ? 300 : 1500;
}

int ObjectiveSpec::effective_segments() const {
  return n_segments > 0 ? n_segments : default_segments(duration);
}

void ObjectiveSpec::validate() const {
  if (!(duration > 0.0)) throw ConfigError("spec: duration must be > 0");
  if (uncertainty < 0.0) throw ConfigError("spec: uncertainty must be >= 0");
  if (trials < 1) throw ConfigError("spec: trials must be >= 1");
  if (cv_size < 1) throw ConfigError("spec: cv_size must be >= 1");
  if (method == Method::kSRobust && training_size < 1)
    throw ConfigError("spec: training_size must be >= 1");
  if (method == Method::kBRobust && batch_size < 1)
    throw ConfigError("spec: batch_size must be >= 1");
  if (pulse_kind == PulseKind::kContinuous && substeps < 2)
    throw ConfigError("spec: substeps must be >= 2 for continuous pulses");
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const AdamParams& hyper) {
  const size_t n = params.size();
  if (grad.size() != n) throw ConfigError("adam_step: shape mismatch");
  if (state.m.empty()) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
  }
  if (!all_finite(grad)) throw NumericalError("adam_step: non-finite gradient");
  state.t += 1;
  const double b1t = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
  const double b2t = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < n; ++i) {
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * grad[i];
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / b1t;
    const double vhat = state.v[i] / b2t;
    params[i] -= hyper.lr * mhat / (std::sqrt(vhat) + hyper.eps);
  }
}

namespace {

// Cheap calibrated-cost bookkeeping for the learning curve of the
// (non)robust methods, whose optimization value is at unit Omega.
double calibrated_curve_cost(const DiscretePulse& fine, const ModeStructure& modes,
                             IonPair pair, double unit_value, double* omega_out) {
  const Calibration cal = calibrate_omega(fine, modes, pair);
  if (omega_out) *omega_out = cal.omega;
  return cal.omega * cal.omega * unit_value;
}

}  // namespace

TrialResult run_trial(const ObjectiveSpec& spec, const ModeStructure& modes, IonPair pair,
                      int trial_index) {
  TrialResult tr;
  tr.index = trial_index;
  tr.seed = stream_tag(spec.seed, StreamPurpose::kTrialInit,
                       static_cast<std::uint64_t>(trial_index));
  const double t_start = now_s();

  try {
    const int n_seg = spec.effective_segments();
    const PulseParametrization par(spec.pulse_kind, n_seg, spec.duration, spec.symmetric(),
                                   spec.substeps);
    const FrequencyWindow window = FrequencyWindow::around_modes(modes, spec.window_margin);

    RngStream init(spec.seed, StreamPurpose::kTrialInit,
                   static_cast<std::uint64_t>(trial_index));
    // Draw the initial guess from the sideband band itself, not the padded
    // clamp window: segments starting tens of kHz off-band settle into far
    // worse basins across every restart.
    const auto [band_lo, band_hi] =
        std::minmax_element(modes.mode_freqs.begin(), modes.mode_freqs.end());
    std::vector<double> params(par.n_free());
    for (double& p : params) p = init.uniform(*band_lo, *band_hi);

    const int iters = spec.effective_iterations();
    tr.curve.reserve(iters);

    SampleSet training;
    if (spec.method == Method::kSRobust)
      training = sample_offsets(spec.uncertainty, modes.n_modes(), spec.training_size,
                                RngStream(spec.seed, StreamPurpose::kTraining, 0),
                                SampleRole::kTraining);

    if (spec.method == Method::kNonrobust || spec.method == Method::kRobust) {
      // Plain gradient descent with a backtracking line search.
      double step_scale = -1.0;
      auto eval = [&](std::span<const double> p) {
        return spec.method == Method::kRobust ? robust_cost(par, p, modes, pair)
                                              : nonrobust_cost(par, p, modes, pair);
      };
      ValueGrad vg = eval(params);
      for (int it = 0; it < iters; ++it) {
        if (!all_finite(vg.grad))
          throw NumericalError("trial " + std::to_string(trial_index) +
                               ": non-finite gradient at iteration " + std::to_string(it));
        double gmax = 0.0;
        for (double g : vg.grad) gmax = std::max(gmax, std::abs(g));
        if (step_scale <= 0.0 && gmax > 0.0) step_scale = (kTwoPi * 5e3) / gmax;

        std::vector<double> cand(params.size());
        ValueGrad cand_vg;
        bool accepted = false;
        double t = step_scale;
        for (int bt = 0; bt < 60 && gmax > 0.0; ++bt) {
          for (size_t i = 0; i < params.size(); ++i)
            cand[i] = window.clamp(params[i] - t * vg.grad[i]);
          cand_vg = eval(cand);
          if (cand_vg.value < vg.value) {
            accepted = true;
            break;
          }
          t *= 0.5;
        }
        if (accepted) {
          params.swap(cand);
          vg = std::move(cand_vg);
          step_scale = t * 2.0;
        }
        CurvePoint cp;
        cp.iter = it;
        cp.cost = calibrated_curve_cost(par.realize(params), modes, pair, vg.value,
                                        &cp.omega);
        tr.curve.push_back(cp);
      }
    } else {
      AdamState state;
      AdamParams hyper;
      hyper.lr = spec.learning_rate;
      for (int it = 0; it < iters; ++it) {
        SampleSet batch;
        std::uint64_t batch_tag = 0;
        const SampleSet* set = &training;
        if (spec.method == Method::kBRobust) {
          const std::uint64_t idx =
              (static_cast<std::uint64_t>(trial_index) << 32) | static_cast<std::uint64_t>(it);
          batch = sample_offsets(spec.uncertainty, modes.n_modes(), spec.batch_size,
                                 RngStream(spec.seed, StreamPurpose::kBatch, idx),
                                 SampleRole::kBatch);
          batch_tag = stream_tag(spec.seed, StreamPurpose::kBatch, idx);
          set = &batch;
        }
        CostReport report;
        ValueGrad vg =
            cost_batch(par, params, modes, pair, *set, spec.displacement_only(), &report);
        if (!all_finite(vg.grad))
          throw NumericalError("trial " + std::to_string(trial_index) +
                               ": non-finite gradient at iteration " + std::to_string(it));

        AdamParams warm = hyper;
        if (spec.lr_decay_floor < 1.0) {
          const double cosine =
              0.5 * (1.0 + std::cos(kPi * static_cast<double>(it) / iters));
          warm.lr = hyper.lr *
                    (spec.lr_decay_floor + (1.0 - spec.lr_decay_floor) * cosine);
        }
        if (spec.warmup_iterations > 0 && state.t < spec.warmup_iterations)
          warm.lr *= (static_cast<double>(state.t) + 1.0) / spec.warmup_iterations;
        adam_step(params, vg.grad, state, warm);
        for (double& p : params) p = window.clamp(p);

        tr.curve.push_back(CurvePoint{it, report.total, report.omega, batch_tag});
      }
    }

    const Calibration cal = calibrate_omega(par.realize(params), modes, pair);
    tr.free_params = params;
    tr.omega = cal.omega;
    tr.angle_sign = cal.angle_sign;
  } catch (const std::exception& e) {
    tr.failed = true;
    tr.error = e.what();
  }

  tr.wall_time_s = now_s() - t_start;
  return tr;
}

double mean_infidelity(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                       const SampleSet& set, const FidelityConfig& fcfg) {
  if (set.offsets.empty()) throw ConfigError("mean_infidelity: empty sample set");
  const DiscretePulse fine = as_discrete(pulse);
  const Calibration cal = calibrate_omega(fine, modes, pair);
  const int count = static_cast<int>(set.offsets.size());
  std::vector<double> errs(count, 0.0);
  parallel_for(count, [&](std::int64_t i) {
    const GateOutcome out = gate_outcome(fine, modes, pair, cal.omega, set.offsets[i]);
    errs[i] = 1.0 - fidelity(out, fcfg, cal.angle_sign);
  });
  double s = 0.0;
  for (double e : errs) s += e;
  return s / count;
}

namespace {

OptimizationRun assemble(const ObjectiveSpec& spec, const ModeStructure& modes,
                         IonPair pair, std::vector<TrialResult> trials, double t_start) {
  const PulseParametrization par(spec.pulse_kind, spec.effective_segments(), spec.duration,
                                 spec.symmetric(), spec.substeps);
  const SampleSet cv =
      sample_offsets(spec.uncertainty, modes.n_modes(), spec.cv_size,
                     RngStream(spec.seed, StreamPurpose::kCrossValidation, 0),
                     SampleRole::kCrossValidation);

  OptimizationRun run;
  run.spec = spec;
  int best = -1;
  for (auto& tr : trials) {
    if (tr.failed) continue;
    tr.cv_score = mean_infidelity(par.to_pulse(tr.free_params), modes, pair, cv);
    if (best < 0 || tr.cv_score < trials[best].cv_score) best = tr.index;
  }
  if (best < 0) {
    std::string detail;
    for (const auto& tr : trials)
      detail += "\n  trial " + std::to_string(tr.index) + ": " + tr.error;
    throw NumericalError("optimize: all trials failed" + detail);
  }
  run.selected_index = best;
  run.selected = par.to_pulse(trials[best].free_params);
  run.omega = trials[best].omega;
  run.angle_sign = trials[best].angle_sign;
  run.trials = std::move(trials);
  run.wall_time_s = now_s() - t_start;
  return run;
}

}  // namespace

OptimizationRun optimize(const ObjectiveSpec& spec, const ModeStructure& modes,
                         IonPair pair) {
  spec.validate();
  const double t_start = now_s();
  std::vector<TrialResult> trials;
  trials.push_back(run_trial(spec, modes, pair, 0));
  return assemble(spec, modes, pair, std::move(trials), t_start);
}

OptimizationRun multi_trial(const ObjectiveSpec& spec, const ModeStructure& modes,
                            IonPair pair) {
  spec.validate();
  const double t_start = now_s();
  std::vector<TrialResult> trials(spec.trials);
  parallel_for(spec.trials,
               [&](std::int64_t i) { trials[i] = run_trial(spec, modes, pair, static_cast<int>(i)); });
  return assemble(spec, modes, pair, std::move(trials), t_start);
}

}  // namespace fmforge
