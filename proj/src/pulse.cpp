#include "fmforge/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fmforge/errors.hpp"

namespace fmforge {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

void check_time(double t, double tau) {
  if (!(t >= 0.0 && t <= tau))
    throw ConfigError("sample_drive: t=" + std::to_string(t) + " outside [0, " +
                      std::to_string(tau) + "]");
}
}  // namespace

double pulse_duration(const Pulse& p) {
  return std::visit([](const auto& q) { return q.duration; }, p);
}

bool pulse_symmetric(const Pulse& p) {
  return std::visit([](const auto& q) { return q.symmetric; }, p);
}

double sample_drive(const DiscretePulse& pulse, double t) {
  check_time(t, pulse.duration);
  const int n = pulse.n_segments();
  int idx = static_cast<int>(t / pulse.dt());
  idx = std::clamp(idx, 0, n - 1);
  return pulse.segment_freqs[idx];
}

double sample_drive(const ContinuousPulse& pulse, double t) {
  check_time(t, pulse.duration);
  const int n = pulse.n_segments();
  const double dt = pulse.duration / n;
  // Plateau values live at segment midpoints; each internal boundary carries a
  // half-cosine ramp over a window one segment wide centered on it. A
  // palindromic value list therefore gives mu(t) = mu(tau - t) exactly.
  const double x = t / dt - 0.5;  // position in units of midpoint spacing
  if (x <= 0.0) return pulse.step_freqs.front();
  if (x >= n - 1) return pulse.step_freqs.back();
  const int i = std::min(static_cast<int>(x), n - 2);
  const double s = x - i;
  const double w = 0.5 * (1.0 - std::cos(kPi * s));
  return pulse.step_freqs[i] + (pulse.step_freqs[i + 1] - pulse.step_freqs[i]) * w;
}

double sample_drive(const Pulse& pulse, double t) {
  return std::visit([t](const auto& q) { return sample_drive(q, t); }, pulse);
}

DiscretePulse discretize_continuous(const ContinuousPulse& pulse) {
  if (pulse.substeps < 1) throw ConfigError("discretize_continuous: substeps must be >= 1");
  const int n_fine = pulse.n_segments() * pulse.substeps;
  DiscretePulse out;
  out.duration = pulse.duration;
  out.symmetric = pulse.symmetric;
  out.segment_freqs.resize(n_fine);
  const double fine_dt = pulse.duration / n_fine;
  for (int i = 0; i < n_fine; ++i)
    out.segment_freqs[i] = sample_drive(pulse, (i + 0.5) * fine_dt);
  return out;
}

std::vector<double> expand_symmetric(std::span<const double> half_params, int n_seg) {
  const int half = (n_seg + 1) / 2;
  if (static_cast<int>(half_params.size()) != half)
    throw ConfigError("expand_symmetric: expected " + std::to_string(half) +
                      " half parameters, got " + std::to_string(half_params.size()));
  std::vector<double> full(n_seg);
  for (int i = 0; i < half; ++i) {
    full[i] = half_params[i];
    full[n_seg - 1 - i] = half_params[i];
  }
  return full;
}

std::vector<double> fold_symmetric(std::span<const double> full, int n_seg) {
  if (static_cast<int>(full.size()) != n_seg)
    throw ConfigError("fold_symmetric: length mismatch");
  const int half = (n_seg + 1) / 2;
  std::vector<double> out(half);
  for (int i = 0; i < half; ++i) out[i] = 0.5 * (full[i] + full[n_seg - 1 - i]);
  return out;
}

int default_segments(double duration) {
  return std::max(1, static_cast<int>(std::lround(16.0 * duration / 200e-6)));
}

FrequencyWindow FrequencyWindow::around_modes(const ModeStructure& modes, double margin) {
  const auto [lo_it, hi_it] =
      std::minmax_element(modes.mode_freqs.begin(), modes.mode_freqs.end());
  return FrequencyWindow{*lo_it - margin, *hi_it + margin};
}

double FrequencyWindow::clamp(double f) const { return std::clamp(f, lo, hi); }

}  // namespace fmforge
