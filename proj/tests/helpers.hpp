#pragma once

#include <vector>

#include "fmforge/dynamics.hpp"
#include "fmforge/modes.hpp"
#include "fmforge/pulse.hpp"
#include "fmforge/rng.hpp"

namespace testutil {

// Random stepwise pulse with segment values inside the sideband window.
inline fmforge::DiscretePulse random_pulse(const fmforge::ModeStructure& modes, int n_seg,
                                           double tau, fmforge::RngStream& rng,
                                           bool symmetric = false) {
  const fmforge::FrequencyWindow w = fmforge::FrequencyWindow::around_modes(modes);
  std::vector<double> f(n_seg);
  for (double& x : f) x = rng.uniform(w.lo, w.hi);
  if (symmetric)
    for (int i = 0; i < n_seg / 2; ++i) f[n_seg - 1 - i] = f[i];
  return fmforge::DiscretePulse{f, tau, symmetric};
}

inline std::vector<double> random_offsets(int n_modes, double scale,
                                          fmforge::RngStream& rng) {
  std::vector<double> eps(n_modes);
  for (double& e : eps) e = scale * rng.normal();
  return eps;
}

}  // namespace testutil
