#include "fmforge/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "fmforge/errors.hpp"
#include "fmforge/parallel.hpp"

namespace fmforge {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTargetAngle = kPi / 4.0;
}  // namespace

PulseParametrization::PulseParametrization(PulseKind kind, int n_seg, double duration,
                                           bool symmetric, int substeps)
    : kind_(kind), n_seg_(n_seg), duration_(duration), symmetric_(symmetric),
      substeps_(substeps) {
  if (n_seg < 1) throw ConfigError("parametrization: need at least one segment");
  if (!(duration > 0.0)) throw ConfigError("parametrization: duration must be > 0");
  if (kind == PulseKind::kContinuous && substeps < 2)
    throw ConfigError("parametrization: continuous pulses need substeps >= 2");
  n_free_ = symmetric ? (n_seg + 1) / 2 : n_seg;
}

std::vector<double> PulseParametrization::expand(std::span<const double> free_params) const {
  if (static_cast<int>(free_params.size()) != n_free_)
    throw ConfigError("parametrization: free parameter count mismatch");
  if (symmetric_) return expand_symmetric(free_params, n_seg_);
  return {free_params.begin(), free_params.end()};
}

DiscretePulse PulseParametrization::realize(std::span<const double> free_params) const {
  auto full = expand(free_params);
  if (kind_ == PulseKind::kDiscrete)
    return DiscretePulse{std::move(full), duration_, symmetric_};
  return discretize_continuous(ContinuousPulse{std::move(full), duration_, substeps_,
                                               symmetric_});
}

Pulse PulseParametrization::to_pulse(std::span<const double> free_params) const {
  auto full = expand(free_params);
  if (kind_ == PulseKind::kDiscrete)
    return DiscretePulse{std::move(full), duration_, symmetric_};
  return ContinuousPulse{std::move(full), duration_, substeps_, symmetric_};
}

std::vector<double> PulseParametrization::from_pulse(const Pulse& pulse) const {
  const auto& freqs = std::visit(
      [](const auto& p) -> const std::vector<double>& {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, DiscretePulse>)
          return p.segment_freqs;
        else
          return p.step_freqs;
      },
      pulse);
  if (static_cast<int>(freqs.size()) != n_seg_)
    throw ConfigError("parametrization: pulse segment count mismatch");
  if (symmetric_) return fold_symmetric(freqs, n_seg_);
  return freqs;
}

std::vector<double> PulseParametrization::pullback(std::span<const double> grad_fine) const {
  std::vector<double> coarse(n_seg_, 0.0);
  if (kind_ == PulseKind::kDiscrete) {
    if (static_cast<int>(grad_fine.size()) != n_seg_)
      throw ConfigError("pullback: gradient length mismatch");
    std::copy(grad_fine.begin(), grad_fine.end(), coarse.begin());
  } else {
    const int n_fine = n_seg_ * substeps_;
    if (static_cast<int>(grad_fine.size()) != n_fine)
      throw ConfigError("pullback: gradient length mismatch");
    // Each fine step's value is a convex combination of at most two plateau
    // values; mirror of the sampling rule in sample_drive(ContinuousPulse).
    for (int i = 0; i < n_fine; ++i) {
      const double x = (i + 0.5) / substeps_ - 0.5;
      if (x <= 0.0) {
        coarse[0] += grad_fine[i];
      } else if (x >= n_seg_ - 1) {
        coarse[n_seg_ - 1] += grad_fine[i];
      } else {
        const int c = std::min(static_cast<int>(x), n_seg_ - 2);
        const double s = x - c;
        const double w = 0.5 * (1.0 - std::cos(kPi * s));
        coarse[c] += (1.0 - w) * grad_fine[i];
        coarse[c + 1] += w * grad_fine[i];
      }
    }
  }
  if (!symmetric_) return coarse;
  std::vector<double> free_grad(n_free_, 0.0);
  for (int i = 0; i < n_free_; ++i) {
    const int mirror = n_seg_ - 1 - i;
    free_grad[i] = coarse[i] + (mirror != i ? coarse[mirror] : 0.0);
  }
  return free_grad;
}

PulseParametrization parametrization_of(const Pulse& pulse) {
  if (const auto* d = std::get_if<DiscretePulse>(&pulse))
    return PulseParametrization(PulseKind::kDiscrete, d->n_segments(), d->duration,
                                d->symmetric);
  const auto& c = std::get<ContinuousPulse>(pulse);
  return PulseParametrization(PulseKind::kContinuous, c.n_segments(), c.duration,
                              c.symmetric, c.substeps);
}

SampleSet sample_offsets(double uncertainty, int n_modes, int count, RngStream stream,
                         SampleRole role) {
  if (uncertainty < 0.0) throw ConfigError("sample_offsets: uncertainty must be >= 0");
  SampleSet set;
  set.role = role;
  set.uncertainty = uncertainty;
  set.offsets.assign(count, std::vector<double>(n_modes, 0.0));
  if (uncertainty > 0.0) {
    for (auto& vec : set.offsets)
      for (auto& e : vec) e = uncertainty * stream.normal();
  }
  return set;
}

Calibration calibrate_omega(const DiscretePulse& pulse, const ModeStructure& modes,
                            IonPair pair) {
  Calibration cal;
  cal.theta_unit = rotation_angle(pulse, modes, pair, 1.0);
  if (std::abs(cal.theta_unit) < 1e-18)
    throw NumericalError("calibrate_omega: degenerate pulse, Theta at unit Omega is zero");
  cal.angle_sign = cal.theta_unit > 0.0 ? 1.0 : -1.0;
  cal.omega = std::sqrt(kTargetAngle / std::abs(cal.theta_unit));
  return cal;
}

Calibration calibrate_omega(const Pulse& pulse, const ModeStructure& modes, IonPair pair) {
  return calibrate_omega(as_discrete(pulse), modes, pair);
}

double cost_sample(const GateOutcome& outcome, double angle_sign) {
  const double angle_err = outcome.theta - angle_sign * kTargetAngle;
  return outcome.displacement_error() + 0.5 * angle_err * angle_err;
}

namespace {

// Shared per-evaluation quantities at unit Omega: the eta-weighted
// displacement error, the angle, and their segment-space gradients.
struct UnitEval {
  double disp_err = 0.0;   // sum_j sum_k |alpha|^2 at Omega = 1
  double theta = 0.0;      // Theta at Omega = 1
  std::vector<double> d_disp;   // gradient of disp_err
  std::vector<double> d_theta;  // gradient of theta
};

UnitEval unit_eval(const DiscretePulse& fine, const ModeStructure& modes, IonPair pair,
                   std::span<const double> offsets, bool want_disp, bool want_theta,
                   bool want_grads) {
  const PhaseTable pt = phase_table(fine, modes, offsets);
  const ModeIntegrals mi = mode_integrals(pt);
  const int nk = modes.n_modes();
  const int ns = fine.n_segments();

  UnitEval ev;
  std::vector<double> eta2(nk), etaprod(nk);
  for (int k = 0; k < nk; ++k) {
    const double e1 = modes.lamb_dicke[k][pair.first];
    const double e2 = modes.lamb_dicke[k][pair.second];
    eta2[k] = e1 * e1 + e2 * e2;
    etaprod[k] = e1 * e2;
  }
  if (want_disp)
    for (int k = 0; k < nk; ++k) ev.disp_err += 0.25 * eta2[k] * std::norm(mi.disp[k]);
  if (want_theta) {
    double s = 0.0;
    for (int k = 0; k < nk; ++k) s += etaprod[k] * mi.theta_im[k];
    ev.theta = -0.5 * s;
  }
  if (want_grads) {
    const ModeIntegralGradients g =
        mode_integral_gradients(pt, want_disp, false, want_theta);
    if (want_disp) {
      ev.d_disp.assign(ns, 0.0);
      for (int k = 0; k < nk; ++k)
        for (int n = 0; n < ns; ++n)
          ev.d_disp[n] +=
              0.5 * eta2[k] * (std::conj(mi.disp[k]) * g.disp[k][n]).real();
    }
    if (want_theta) {
      ev.d_theta.assign(ns, 0.0);
      for (int k = 0; k < nk; ++k)
        for (int n = 0; n < ns; ++n)
          ev.d_theta[n] += -0.5 * etaprod[k] * g.theta_im[k][n];
    }
  }
  return ev;
}

}  // namespace

ValueGrad cost_batch(const PulseParametrization& par, std::span<const double> free_params,
                     const ModeStructure& modes, IonPair pair, const SampleSet& samples,
                     bool displacement_only, CostReport* report) {
  if (samples.offsets.empty()) throw ConfigError("cost_batch: empty sample set");
  const DiscretePulse fine = par.realize(free_params);
  const int ns = fine.n_segments();
  const int count = static_cast<int>(samples.offsets.size());

  // Per-iteration calibration at zero offset.
  const UnitEval nominal = unit_eval(fine, modes, pair, {}, false, true, true);
  if (std::abs(nominal.theta) < 1e-18)
    throw NumericalError("cost_batch: degenerate pulse, Theta at unit Omega is zero");
  const double sign = nominal.theta > 0.0 ? 1.0 : -1.0;
  const double omega2 = kTargetAngle / std::abs(nominal.theta);

  struct PerSample {
    double cost = 0.0;
    double disp = 0.0;
    double angle = 0.0;
    std::vector<double> grad;       // w.r.t. fine segments, alpha/Theta part
    double omega2_coupling = 0.0;   // factor multiplying d(omega^2)
  };
  std::vector<PerSample> per(count);

  parallel_for(count, [&](std::int64_t i) {
    const UnitEval ev = unit_eval(fine, modes, pair, samples.offsets[i], true,
                                  !displacement_only, true);
    PerSample& p = per[i];
    p.disp = omega2 * ev.disp_err;
    p.grad.assign(ns, 0.0);
    for (int n = 0; n < ns; ++n) p.grad[n] = omega2 * ev.d_disp[n];
    p.omega2_coupling = ev.disp_err;
    if (!displacement_only) {
      const double angle_err = omega2 * ev.theta - sign * kTargetAngle;
      p.angle = 0.5 * angle_err * angle_err;
      for (int n = 0; n < ns; ++n) p.grad[n] += angle_err * omega2 * ev.d_theta[n];
      p.omega2_coupling += angle_err * ev.theta;
    }
    p.cost = p.disp + p.angle;
  });

  // d(omega^2)/d mu_n through the calibration constraint.
  std::vector<double> domega2(ns);
  for (int n = 0; n < ns; ++n)
    domega2[n] = -omega2 * nominal.d_theta[n] / nominal.theta;

  ValueGrad out;
  std::vector<double> grad_fine(ns, 0.0);
  double disp_term = 0.0, angle_term = 0.0;
  for (const PerSample& p : per) {
    out.value += p.cost;
    disp_term += p.disp;
    angle_term += p.angle;
    for (int n = 0; n < ns; ++n)
      grad_fine[n] += p.grad[n] + domega2[n] * p.omega2_coupling;
  }
  const double inv = 1.0 / count;
  out.value *= inv;
  for (double& g : grad_fine) g *= inv;
  out.grad = par.pullback(grad_fine);

  if (report) {
    report->total = out.value;
    report->omega = std::sqrt(omega2);
    report->displacement_term = disp_term * inv;
    report->angle_term = angle_term * inv;
    report->per_sample.resize(count);
    for (int i = 0; i < count; ++i) report->per_sample[i] = per[i].cost;
  }
  return out;
}

ValueGrad nonrobust_cost(const PulseParametrization& par,
                         std::span<const double> free_params, const ModeStructure& modes,
                         IonPair pair) {
  const DiscretePulse fine = par.realize(free_params);
  const UnitEval ev = unit_eval(fine, modes, pair, {}, true, false, true);
  ValueGrad out;
  out.value = ev.disp_err;
  out.grad = par.pullback(ev.d_disp);
  return out;
}

ValueGrad robust_cost(const PulseParametrization& par, std::span<const double> free_params,
                      const ModeStructure& modes, IonPair pair) {
  if (!par.symmetric())
    throw ConfigError(
        "robust_cost: requires a time-symmetric pulse (the symmetry is what makes the "
        "final displacement vanish along with the time-averaged one)");
  const DiscretePulse fine = par.realize(free_params);
  const PhaseTable pt = phase_table(fine, modes, {});
  const ModeIntegrals mi = mode_integrals(pt);
  const ModeIntegralGradients g = mode_integral_gradients(pt, false, true, false);
  const int nk = modes.n_modes();
  const int ns = fine.n_segments();

  ValueGrad out;
  std::vector<double> grad_fine(ns, 0.0);
  for (int k = 0; k < nk; ++k) {
    const double e1 = modes.lamb_dicke[k][pair.first];
    const double e2 = modes.lamb_dicke[k][pair.second];
    const double w = 0.25 * (e1 * e1 + e2 * e2);
    out.value += w * std::norm(mi.avg[k]);
    for (int n = 0; n < ns; ++n)
      grad_fine[n] += 2.0 * w * (std::conj(mi.avg[k]) * g.avg[k][n]).real();
  }
  out.grad = par.pullback(grad_fine);
  return out;
}

double avg_displacement_cost(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                             const SampleSet& test_set) {
  if (test_set.offsets.empty()) throw ConfigError("avg_displacement_cost: empty sample set");
  const DiscretePulse fine = as_discrete(pulse);
  const Calibration cal = calibrate_omega(fine, modes, pair);
  const int count = static_cast<int>(test_set.offsets.size());
  const int nk = modes.n_modes();

  std::vector<double> vals(count, 0.0);
  parallel_for(count, [&](std::int64_t i) {
    const ModeIntegrals mi = mode_integrals(phase_table(fine, modes, test_set.offsets[i]));
    double s = 0.0;
    for (int k = 0; k < nk; ++k) {
      const double e1 = modes.lamb_dicke[k][pair.first];
      const double e2 = modes.lamb_dicke[k][pair.second];
      s += 0.25 * cal.omega * cal.omega * (e1 * e1 + e2 * e2) * std::norm(mi.avg[k]);
    }
    vals[i] = s;
  });
  double total = 0.0;
  for (double v : vals) total += v;
  return total / count;
}

double fidelity(const GateOutcome& outcome, const FidelityConfig& fcfg, double angle_sign) {
  double weighted = 0.0;
  const int nk = static_cast<int>(outcome.alpha[0].size());
  for (int k = 0; k < nk; ++k) {
    const double w = fcfg.nbar_at(k) + 0.5;
    weighted += w * (std::norm(outcome.alpha[0][k]) + std::norm(outcome.alpha[1][k]));
  }
  // The displacement factor expands a positive thermal overlap; floor it at
  // zero so large offsets saturate instead of producing |F| > 1.
  return std::cos(outcome.theta - angle_sign * kTargetAngle) *
         std::max(0.0, 1.0 - weighted);
}

}  // namespace fmforge
