// Timing comparison of the parallel evaluation kernels against the serial
// path, and of the linear-time rotation-angle kernel against the quadratic
// reference. Prints a small table; no pass/fail.

#include <chrono>
#include <cstdio>
#include <vector>

#include "fmforge/evaluation.hpp"
#include "fmforge/parallel.hpp"

using namespace fmforge;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double best_of(int reps, const F& f) {
  double best = 1e100;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_s();
    f();
    best = std::min(best, now_s() - t0);
  }
  return best;
}

DiscretePulse random_pulse(const ModeStructure& modes, int n_seg, double tau,
                           RngStream& rng) {
  const FrequencyWindow w = FrequencyWindow::around_modes(modes);
  std::vector<double> f(n_seg);
  for (double& x : f) x = rng.uniform(w.lo, w.hi);
  return DiscretePulse{f, tau, false};
}

}  // namespace

int main() {
  const ModeStructure modes = transverse_modes(TrapConfig::yb171(4));
  const IonPair pair{0, 3};
  RngStream rng(1, StreamPurpose::kTest, 0);

  std::printf("rotation angle: linear kernel vs quadratic reference\n");
  std::printf("%10s %14s %14s %10s\n", "segments", "linear (us)", "naive (us)", "speedup");
  for (int n_seg : {16, 64, 256, 1024}) {
    const DiscretePulse p = random_pulse(modes, n_seg, 2e-4, rng);
    volatile double sink = 0.0;
    const int inner = 100000 / n_seg + 1;
    const double t_fast = best_of(5, [&] {
      for (int i = 0; i < inner; ++i)
        sink = sink + rotation_angle(p, modes, pair, 1.0);
    }) / inner;
    const double t_naive = best_of(5, [&] {
      for (int i = 0; i < inner; ++i)
        sink = sink + rotation_angle_naive(p, modes, pair, 1.0);
    }) / inner;
    std::printf("%10d %14.2f %14.2f %9.1fx\n", n_seg, t_fast * 1e6, t_naive * 1e6,
                t_naive / t_fast);
  }

  std::printf("\ngradient kernels: linear vs quadratic reference (1024 segments)\n");
  {
    const DiscretePulse p = random_pulse(modes, 1024, 2e-4, rng);
    volatile double sink = 0.0;
    const double t_fast = best_of(5, [&] {
      sink = sink + grad_rotation_angle(p, modes, pair, 1.0)[0];
    });
    const double t_naive = best_of(3, [&] {
      sink = sink + grad_rotation_angle_naive(p, modes, pair, 1.0)[0];
    });
    std::printf("linear %.2f ms, naive %.2f ms, speedup %.1fx\n", t_fast * 1e3,
                t_naive * 1e3, t_naive / t_fast);
  }

  std::printf("\nerror landscape (2 ions, 121x121): serial vs parallel\n");
  {
    const ModeStructure m2 = transverse_modes(TrapConfig::yb171(2));
    RngStream r2(2, StreamPurpose::kTest, 0);
    const DiscretePulse p = random_pulse(m2, 16, 2e-4, r2);
    LandscapeSpec grid;
    grid.points_per_axis = 121;
    set_max_threads(1);
    const double t_serial =
        best_of(3, [&] { error_landscape(Pulse{p}, m2, IonPair{0, 1}, grid); });
    set_max_threads(0);
    const double t_parallel =
        best_of(3, [&] { error_landscape(Pulse{p}, m2, IonPair{0, 1}, grid); });
    std::printf("serial %.1f ms, parallel %.1f ms, speedup %.1fx\n", t_serial * 1e3,
                t_parallel * 1e3, t_serial / t_parallel);
  }

  std::printf("\ntest fidelity (4 ions, 100k samples): serial vs parallel\n");
  {
    const DiscretePulse p = random_pulse(modes, 16, 2e-4, rng);
    set_max_threads(1);
    const double t_serial = best_of(3, [&] {
      test_fidelity(Pulse{p}, modes, pair, kTwoPi * 1e3, 100000, 1);
    });
    set_max_threads(0);
    const double t_parallel = best_of(3, [&] {
      test_fidelity(Pulse{p}, modes, pair, kTwoPi * 1e3, 100000, 1);
    });
    std::printf("serial %.1f ms, parallel %.1f ms, speedup %.1fx\n", t_serial * 1e3,
                t_parallel * 1e3, t_serial / t_parallel);
  }
  return 0;
}
