#include "fmforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fmforge/errors.hpp"
#include "fmforge/kernels.hpp"
#include "fmforge/parallel.hpp"

namespace fmforge {

FidelityReport test_fidelity(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                             double uncertainty, int test_size, std::uint64_t seed,
                             const FidelityConfig& fcfg) {
  if (test_size < 1) throw ConfigError("test_fidelity: test_size must be >= 1");
  const SampleSet test =
      sample_offsets(uncertainty, modes.n_modes(), test_size,
                     RngStream(seed, StreamPurpose::kTest, 0), SampleRole::kTest);
  const DiscretePulse fine = as_discrete(pulse);
  const Calibration cal = calibrate_omega(fine, modes, pair);

  FidelityReport rep;
  rep.omega = cal.omega;
  rep.per_sample.assign(test_size, 0.0);
  parallel_for(test_size, [&](std::int64_t i) {
    const GateOutcome out = gate_outcome(fine, modes, pair, cal.omega, test.offsets[i]);
    rep.per_sample[i] = fidelity(out, fcfg, cal.angle_sign);
  });
  double s = 0.0, s2 = 0.0;
  for (double f : rep.per_sample) {
    s += f;
    s2 += f * f;
  }
  rep.mean = s / test_size;
  rep.stddev = std::sqrt(std::max(0.0, s2 / test_size - rep.mean * rep.mean));
  return rep;
}

double Landscape::area_at(double thr) const {
  if (eps1_grid.size() < 2 || eps2_grid.size() < 2) return 0.0;
  const double cell = (eps1_grid[1] - eps1_grid[0]) * (eps2_grid[1] - eps2_grid[0]);
  std::int64_t count = 0;
  for (const auto& row : error)
    for (double e : row)
      if (e < thr) ++count;
  return count * cell;
}

Landscape error_landscape(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                          const LandscapeSpec& grid, const FidelityConfig& fcfg) {
  if (modes.n_modes() != 2)
    throw ConfigError("error_landscape: needs a two-ion chain (one offset per mode)");
  if (grid.points_per_axis < 2)
    throw ConfigError("error_landscape: need at least 2 points per axis");

  const int n = grid.points_per_axis;
  Landscape ls;
  ls.threshold = grid.threshold;
  ls.eps1_grid.resize(n);
  ls.eps2_grid.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = -grid.half_width + 2.0 * grid.half_width * i / (n - 1);
    ls.eps1_grid[i] = x;
    ls.eps2_grid[i] = x;
  }

  const DiscretePulse fine = as_discrete(pulse);
  const Calibration cal = calibrate_omega(fine, modes, pair);
  ls.error.assign(n, std::vector<double>(n, 0.0));
  parallel_for(static_cast<std::int64_t>(n) * n, [&](std::int64_t idx) {
    const int i1 = static_cast<int>(idx / n);
    const int i2 = static_cast<int>(idx % n);
    const double eps[2] = {ls.eps1_grid[i1], ls.eps2_grid[i2]};
    const GateOutcome out = gate_outcome(fine, modes, pair, cal.omega, eps);
    ls.error[i1][i2] = 1.0 - fidelity(out, fcfg, cal.angle_sign);
  });
  ls.area = ls.area_at(grid.threshold);
  return ls;
}

Trajectory trajectory(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                      double omega, std::span<const double> offsets) {
  const DiscretePulse fine = as_discrete(pulse);
  const PhaseTable pt = phase_table(fine, modes, offsets);
  const int nk = modes.n_modes();
  const int ns = pt.n_seg;
  const int ions[2] = {pair.first, pair.second};

  Trajectory tj;
  tj.times.resize(ns + 1);
  for (int b = 0; b <= ns; ++b) tj.times[b] = b * pt.dt;
  for (int i = 0; i < 2; ++i)
    tj.alpha[i].assign(nk, std::vector<Complex>(ns + 1, Complex(0.0)));
  tj.theta.assign(ns + 1, 0.0);

  std::vector<double> theta_im(ns + 1, 0.0);
  for (int k = 0; k < nk; ++k) {
    Complex prefix = 0.0;
    Complex doubled = 0.0;
    const double w = modes.lamb_dicke[k][pair.first] * modes.lamb_dicke[k][pair.second];
    for (int n = 0; n < ns; ++n) {
      const double delta = pt.detuning[k][n];
      const Complex phase = std::exp(Complex(0.0, -pt.boundary_phase[k][n]));
      const Complex seg = phase * kernels::e0(delta, pt.dt);
      doubled += std::conj(seg) * prefix + std::conj(kernels::d0(delta, pt.dt));
      prefix += seg;
      for (int i = 0; i < 2; ++i)
        tj.alpha[i][k][n + 1] = 0.5 * omega * modes.lamb_dicke[k][ions[i]] * prefix;
      theta_im[n + 1] += w * doubled.imag();
    }
  }
  for (int b = 0; b <= ns; ++b) tj.theta[b] = -0.5 * omega * omega * theta_im[b];
  return tj;
}

namespace {

DiscretePulse concatenate(const DiscretePulse& pulse, int n_gates, double drive_offset) {
  DiscretePulse out;
  out.duration = pulse.duration * n_gates;
  out.symmetric = false;
  out.segment_freqs.reserve(pulse.segment_freqs.size() * n_gates);
  for (int g = 0; g < n_gates; ++g)
    for (double f : pulse.segment_freqs) out.segment_freqs.push_back(f + drive_offset);
  return out;
}

}  // namespace

SequencePoint sequence_populations(const Pulse& pulse, const ModeStructure& modes,
                                   IonPair pair, int n_gates, double detuning_offset,
                                   const FidelityConfig& fcfg) {
  if (n_gates < 1) throw ConfigError("sequence_populations: n_gates must be >= 1");
  const DiscretePulse fine = as_discrete(pulse);
  const Calibration cal = calibrate_omega(fine, modes, pair);
  const DiscretePulse seq = concatenate(fine, n_gates, detuning_offset);
  const GateOutcome out = gate_outcome(seq, modes, pair, cal.omega);

  const int nk = modes.n_modes();
  // sigma_x eigenbasis branches s = (s1, s2); branch displacement per mode is
  // s1 alpha_k^j1 + s2 alpha_k^j2 and the branch phase is Theta s1 s2.
  const int signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  Complex m[4][4];
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double dphi = out.theta * (signs[a][0] * signs[a][1] - signs[b][0] * signs[b][1]);
      Complex v = 0.25 * std::exp(Complex(0.0, dphi));
      for (int k = 0; k < nk; ++k) {
        const Complex beta_a =
            static_cast<double>(signs[a][0]) * out.alpha[0][k] +
            static_cast<double>(signs[a][1]) * out.alpha[1][k];
        const Complex beta_b =
            static_cast<double>(signs[b][0]) * out.alpha[0][k] +
            static_cast<double>(signs[b][1]) * out.alpha[1][k];
        // Tr[rho_th D(beta_b)^dag D(beta_a)]
        const double im = (beta_b * std::conj(beta_a)).imag();
        const double dist2 = std::norm(beta_a - beta_b);
        v *= std::exp(Complex(0.0, -im)) *
             std::exp(-dist2 * (fcfg.nbar_at(k) + 0.5));
      }
      m[a][b] = v;
    }
  }

  SequencePoint sp;
  sp.detuning = detuning_offset;
  Complex p00 = 0.0, p11 = 0.0, p01 = 0.0, p10 = 0.0, coh = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double s1 = signs[a][0], s2 = signs[a][1];
      const double t1 = signs[b][0], t2 = signs[b][1];
      p00 += 0.25 * m[a][b];
      p11 += 0.25 * m[a][b] * (s1 * s2 * t1 * t2);
      p01 += 0.25 * m[a][b] * (s2 * t2);
      p10 += 0.25 * m[a][b] * (s1 * t1);
      coh += 0.25 * m[a][b] * (t1 * t2);  // <00|rho|11> element
    }
  }
  sp.p00 = p00.real();
  sp.p11 = p11.real();
  sp.p_odd = p01.real() + p10.real();
  sp.parity_contrast = 2.0 * std::abs(coh);
  return sp;
}

std::vector<SequencePoint> sequence_scan(const Pulse& pulse, const ModeStructure& modes,
                                         IonPair pair, int n_gates, double scan_half_width,
                                         int n_points, const FidelityConfig& fcfg) {
  if (n_points < 2) throw ConfigError("sequence_scan: need at least 2 points");
  std::vector<SequencePoint> out(n_points);
  parallel_for(n_points, [&](std::int64_t i) {
    const double d = -scan_half_width + 2.0 * scan_half_width * i / (n_points - 1);
    out[i] = sequence_populations(pulse, modes, pair, n_gates, d, fcfg);
  });
  return out;
}

std::vector<IonPair> sweep_pairs(int n_ions) {
  const int lo = n_ions >= 6 ? 1 : 0;
  const int hi = n_ions >= 6 ? n_ions - 2 : n_ions - 1;
  std::vector<IonPair> pairs;
  for (int a = lo; a <= hi; ++a)
    for (int b = a + 1; b <= hi; ++b) pairs.push_back(IonPair{a, b});
  return pairs;
}

SweepReport scalability_sweep(const ObjectiveSpec& spec_template,
                              const std::vector<int>& n_ions_list, int test_size,
                              std::uint64_t test_seed) {
  SweepReport rep;
  for (int n : n_ions_list) {
    const TrapConfig trap = TrapConfig::yb171(n);
    const ModeStructure modes = transverse_modes(trap);
    SweepReport::Aggregate agg;
    agg.n_ions = n;
    std::vector<double> fids;
    for (const IonPair& pair : sweep_pairs(n)) {
      SweepPairResult pr;
      pr.n_ions = n;
      pr.pair = pair;
      try {
        const OptimizationRun run = multi_trial(spec_template, modes, pair);
        const FidelityReport fr = test_fidelity(run.selected, modes, pair,
                                                spec_template.uncertainty, test_size,
                                                test_seed);
        pr.mean_fidelity = fr.mean;
        pr.omega = run.omega;
        pr.wall_time_s = run.wall_time_s / std::max(1, spec_template.trials);
      } catch (const std::exception& e) {
        pr.failed = true;
        pr.error = e.what();
      }
      if (!pr.failed) {
        fids.push_back(pr.mean_fidelity);
        agg.mean_omega += pr.omega;
        agg.mean_wall_time_s += pr.wall_time_s;
        agg.n_pairs += 1;
      }
      rep.pairs.push_back(std::move(pr));
    }
    if (agg.n_pairs > 0) {
      agg.mean_omega /= agg.n_pairs;
      agg.mean_wall_time_s /= agg.n_pairs;
      double s = 0.0, s2 = 0.0;
      for (double f : fids) {
        s += f;
        s2 += f * f;
      }
      agg.mean_fidelity = s / agg.n_pairs;
      agg.std_fidelity = std::sqrt(std::max(0.0, s2 / agg.n_pairs -
                                                    agg.mean_fidelity * agg.mean_fidelity));
    }
    rep.aggregates.push_back(agg);
  }
  return rep;
}

double dephasing_metric(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                        double uncertainty, int test_size, std::uint64_t seed) {
  const SampleSet test =
      sample_offsets(uncertainty, modes.n_modes(), test_size,
                     RngStream(seed, StreamPurpose::kTest, 0), SampleRole::kTest);
  return avg_displacement_cost(pulse, modes, pair, test);
}

std::vector<BatchStudyEntry> batch_size_study(const std::vector<int>& sizes,
                                              int eval_budget,
                                              const ObjectiveSpec& spec_template,
                                              const ModeStructure& modes, IonPair pair,
                                              int test_size) {
  std::vector<BatchStudyEntry> out;
  for (int b : sizes) {
    if (b < 1 || eval_budget % b != 0)
      throw ConfigError("batch_size_study: every batch size must divide the budget");
    ObjectiveSpec spec = spec_template;
    spec.method = Method::kBRobust;
    spec.batch_size = b;
    spec.iterations = eval_budget / b;

    BatchStudyEntry entry;
    entry.batch_size = b;
    entry.iterations = spec.iterations;
    const OptimizationRun run = multi_trial(spec, modes, pair);
    entry.curve = run.learning_curve();
    entry.omega = run.omega;
    const SampleSet test =
        sample_offsets(spec.uncertainty, modes.n_modes(), test_size,
                       RngStream(spec.seed, StreamPurpose::kTest, 0), SampleRole::kTest);
    entry.final_mean_error = mean_infidelity(run.selected, modes, pair, test);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace fmforge
