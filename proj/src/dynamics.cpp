#include "fmforge/dynamics.hpp"

#include <cmath>

#include "fmforge/errors.hpp"
#include "fmforge/kernels.hpp"

namespace fmforge {

namespace {
const Complex kI(0.0, 1.0);
}

DiscretePulse as_discrete(const Pulse& pulse) {
  if (const auto* d = std::get_if<DiscretePulse>(&pulse)) return *d;
  return discretize_continuous(std::get<ContinuousPulse>(pulse));
}

PhaseTable phase_table(const DiscretePulse& pulse, const ModeStructure& modes,
                       std::span<const double> offsets) {
  const int nk = modes.n_modes();
  const int ns = pulse.n_segments();
  if (!offsets.empty() && static_cast<int>(offsets.size()) != nk)
    throw ConfigError("phase_table: offsets size does not match mode count");

  PhaseTable pt;
  pt.n_seg = ns;
  pt.dt = pulse.dt();
  pt.duration = pulse.duration;
  pt.detuning.assign(nk, std::vector<double>(ns));
  pt.boundary_phase.assign(nk, std::vector<double>(ns + 1));
  for (int k = 0; k < nk; ++k) {
    const double wk = modes.mode_freqs[k] + (offsets.empty() ? 0.0 : offsets[k]);
    double th = 0.0;
    pt.boundary_phase[k][0] = 0.0;
    for (int n = 0; n < ns; ++n) {
      const double d = pulse.segment_freqs[n] - wk;
      pt.detuning[k][n] = d;
      th += d * pt.dt;
      pt.boundary_phase[k][n + 1] = th;
    }
  }
  return pt;
}

ModeIntegrals mode_integrals(const PhaseTable& pt) {
  const int nk = static_cast<int>(pt.detuning.size());
  const double dt = pt.dt;
  ModeIntegrals mi;
  mi.disp.resize(nk);
  mi.avg.resize(nk);
  mi.theta_im.resize(nk);
  for (int k = 0; k < nk; ++k) {
    Complex prefix = 0.0;  // running sum of segment displacement terms
    Complex doubled = 0.0; // ordered double integral
    Complex avg = 0.0;     // int_0^tau F(t) dt
    for (int n = 0; n < pt.n_seg; ++n) {
      const double delta = pt.detuning[k][n];
      const Complex phase = std::exp(Complex(0.0, -pt.boundary_phase[k][n]));
      const Complex d0 = kernels::d0(delta, dt);
      const Complex seg = phase * kernels::e0(delta, dt);
      // The intra-segment triangle term carries no boundary phase.
      doubled += std::conj(seg) * prefix + std::conj(d0);
      avg += prefix * dt + phase * d0;
      prefix += seg;
    }
    mi.disp[k] = prefix;
    mi.avg[k] = avg / pt.duration;
    mi.theta_im[k] = doubled.imag();
  }
  return mi;
}

ModeIntegralGradients mode_integral_gradients(const PhaseTable& pt, bool want_disp,
                                              bool want_avg, bool want_theta) {
  const int nk = static_cast<int>(pt.detuning.size());
  const int ns = pt.n_seg;
  const double dt = pt.dt;

  ModeIntegralGradients g;
  if (want_disp) g.disp.assign(nk, std::vector<Complex>(ns));
  if (want_avg) g.avg.assign(nk, std::vector<Complex>(ns));
  if (want_theta) g.theta_im.assign(nk, std::vector<double>(ns));

  std::vector<Complex> seg(ns), e1v(ns), d0v(ns), d1v(ns), phase(ns), pref(ns);
  for (int k = 0; k < nk; ++k) {
    Complex acc = 0.0;
    for (int n = 0; n < ns; ++n) {
      const double delta = pt.detuning[k][n];
      phase[n] = std::exp(Complex(0.0, -pt.boundary_phase[k][n]));
      seg[n] = phase[n] * kernels::e0(delta, dt);
      e1v[n] = kernels::e1(delta, dt);
      d0v[n] = kernels::d0(delta, dt);
      d1v[n] = kernels::d1(delta, dt);
      acc += seg[n];
      pref[n] = acc;  // inclusive prefix P_n
    }
    const Complex total = acc;

    // Suffix accumulators, built in one reverse sweep.
    Complex suf_a = 0.0;   // sum_{m>n} conj(seg_m)
    Complex suf_pb = 0.0;  // sum_{m>n} P_{m-1}
    Complex suf_d = 0.0;   // sum_{m>n} phase_m d0_m
    for (int n = ns - 1; n >= 0; --n) {
      const Complex pm1 = pref[n] - seg[n];  // prefix before segment n
      const int after = ns - 1 - n;          // number of later segments
      if (want_disp)
        g.disp[k][n] = -kI * (phase[n] * e1v[n] + dt * (total - pref[n]));
      if (want_avg)
        g.avg[k][n] = (-kI * (phase[n] * (after * dt * e1v[n] + d1v[n]) +
                              dt * dt * (suf_pb - static_cast<double>(after) * pref[n]) +
                              dt * suf_d)) /
                      pt.duration;
      if (want_theta) {
        const Complex dk = kI * std::conj(e1v[n] * phase[n]) * pm1 -
                           kI * phase[n] * e1v[n] * suf_a + kI * dt * pref[n] * suf_a +
                           kI * std::conj(d1v[n]);
        g.theta_im[k][n] = dk.imag();
      }
      suf_a += std::conj(seg[n]);
      suf_pb += pm1;
      suf_d += phase[n] * d0v[n];
    }
  }
  return g;
}

std::vector<Complex> displacement(const DiscretePulse& pulse, const ModeStructure& modes,
                                  int ion, double omega, std::span<const double> offsets) {
  const auto mi = mode_integrals(phase_table(pulse, modes, offsets));
  std::vector<Complex> out(mi.disp.size());
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = 0.5 * omega * modes.lamb_dicke[k][ion] * mi.disp[k];
  return out;
}

std::vector<Complex> avg_displacement(const DiscretePulse& pulse, const ModeStructure& modes,
                                      int ion, double omega, std::span<const double> offsets) {
  const auto mi = mode_integrals(phase_table(pulse, modes, offsets));
  std::vector<Complex> out(mi.avg.size());
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = 0.5 * omega * modes.lamb_dicke[k][ion] * mi.avg[k];
  return out;
}

double rotation_angle(const DiscretePulse& pulse, const ModeStructure& modes, IonPair pair,
                      double omega, std::span<const double> offsets) {
  if (pair.first == pair.second)
    throw ConfigError("rotation_angle: pair must name two distinct ions");
  const auto mi = mode_integrals(phase_table(pulse, modes, offsets));
  double s = 0.0;
  for (size_t k = 0; k < mi.theta_im.size(); ++k)
    s += modes.lamb_dicke[k][pair.first] * modes.lamb_dicke[k][pair.second] * mi.theta_im[k];
  return -0.5 * omega * omega * s;
}

std::vector<std::vector<Complex>> grad_displacement(const DiscretePulse& pulse,
                                                    const ModeStructure& modes, int ion,
                                                    double omega,
                                                    std::span<const double> offsets) {
  const auto g = mode_integral_gradients(phase_table(pulse, modes, offsets), true, false, false);
  auto out = g.disp;
  for (size_t k = 0; k < out.size(); ++k)
    for (auto& v : out[k]) v *= 0.5 * omega * modes.lamb_dicke[k][ion];
  return out;
}

std::vector<std::vector<Complex>> grad_avg_displacement(const DiscretePulse& pulse,
                                                        const ModeStructure& modes, int ion,
                                                        double omega,
                                                        std::span<const double> offsets) {
  const auto g = mode_integral_gradients(phase_table(pulse, modes, offsets), false, true, false);
  auto out = g.avg;
  for (size_t k = 0; k < out.size(); ++k)
    for (auto& v : out[k]) v *= 0.5 * omega * modes.lamb_dicke[k][ion];
  return out;
}

std::vector<double> grad_rotation_angle(const DiscretePulse& pulse,
                                        const ModeStructure& modes, IonPair pair,
                                        double omega, std::span<const double> offsets) {
  const auto g = mode_integral_gradients(phase_table(pulse, modes, offsets), false, false, true);
  const int ns = pulse.n_segments();
  std::vector<double> out(ns, 0.0);
  for (size_t k = 0; k < g.theta_im.size(); ++k) {
    const double w =
        -0.5 * omega * omega * modes.lamb_dicke[k][pair.first] * modes.lamb_dicke[k][pair.second];
    for (int n = 0; n < ns; ++n) out[n] += w * g.theta_im[k][n];
  }
  return out;
}

double GateOutcome::displacement_error() const {
  double s = 0.0;
  for (const auto& row : alpha)
    for (const auto& a : row) s += std::norm(a);
  return s;
}

double GateOutcome::avg_displacement_error() const {
  double s = 0.0;
  for (const auto& row : alpha_avg)
    for (const auto& a : row) s += std::norm(a);
  return s;
}

GateOutcome gate_outcome(const DiscretePulse& pulse, const ModeStructure& modes,
                         IonPair pair, double omega, std::span<const double> offsets) {
  if (pair.first == pair.second)
    throw ConfigError("gate_outcome: pair must name two distinct ions");
  const auto mi = mode_integrals(phase_table(pulse, modes, offsets));
  const int nk = static_cast<int>(mi.disp.size());

  GateOutcome out;
  out.omega = omega;
  const int ions[2] = {pair.first, pair.second};
  for (int i = 0; i < 2; ++i) {
    out.alpha[i].resize(nk);
    out.alpha_avg[i].resize(nk);
    for (int k = 0; k < nk; ++k) {
      const double w = 0.5 * omega * modes.lamb_dicke[k][ions[i]];
      out.alpha[i][k] = w * mi.disp[k];
      out.alpha_avg[i][k] = w * mi.avg[k];
    }
  }
  double s = 0.0;
  for (int k = 0; k < nk; ++k)
    s += modes.lamb_dicke[k][pair.first] * modes.lamb_dicke[k][pair.second] * mi.theta_im[k];
  out.theta = -0.5 * omega * omega * s;
  return out;
}

GateOutcome gate_outcome(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                         double omega, std::span<const double> offsets) {
  return gate_outcome(as_discrete(pulse), modes, pair, omega, offsets);
}

}  // namespace fmforge
