#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmforge/optimizer.hpp"

namespace fmforge {

// Mean test-set fidelity with per-sample values.
struct FidelityReport {
  double mean = 0.0;
  double stddev = 0.0;
  double omega = 0.0;
  std::vector<double> per_sample;  // F(eps)
};

FidelityReport test_fidelity(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                             double uncertainty, int test_size = 1000,
                             std::uint64_t seed = 1, const FidelityConfig& fcfg = {});

// 2-D gate-error landscape over offsets of the two modes of a two-ion chain.
struct LandscapeSpec {
  double half_width = kTwoPi * 3e3;  // rad/s, grid spans +/- this on both axes
  int points_per_axis = 61;
  double threshold = 1e-3;
};

struct Landscape {
  std::vector<double> eps1_grid;  // rad/s
  std::vector<double> eps2_grid;
  std::vector<std::vector<double>> error;  // [i1][i2], 1 - F
  double threshold = 1e-3;
  double area = 0.0;  // (rad/s)^2 below threshold, cell counting

  double area_at(double thr) const;
};

Landscape error_landscape(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                          const LandscapeSpec& grid = {}, const FidelityConfig& fcfg = {});

// Displacements and accumulated angle sampled at segment boundaries.
struct Trajectory {
  std::vector<double> times;  // s
  // alpha[pair ion][mode][time index]
  std::array<std::vector<std::vector<Complex>>, 2> alpha;
  std::vector<double> theta;  // rad, same time base
};

Trajectory trajectory(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                      double omega, std::span<const double> offsets = {});

// Populations after a sequence of identical MS gates applied as one
// concatenated drive, with thermal motion and unitary dynamics.
struct SequencePoint {
  double detuning = 0.0;  // rad/s drive-frequency offset
  double p00 = 0.0;
  double p11 = 0.0;
  double p_odd = 0.0;
  double parity_contrast = 0.0;
};

SequencePoint sequence_populations(const Pulse& pulse, const ModeStructure& modes,
                                   IonPair pair, int n_gates, double detuning_offset,
                                   const FidelityConfig& fcfg = {});

std::vector<SequencePoint> sequence_scan(const Pulse& pulse, const ModeStructure& modes,
                                         IonPair pair, int n_gates, double scan_half_width,
                                         int n_points, const FidelityConfig& fcfg = {});

// Per-pair optimization + evaluation across chain sizes.
struct SweepPairResult {
  int n_ions = 0;
  IonPair pair;
  bool failed = false;
  std::string error;
  double mean_fidelity = 0.0;
  double omega = 0.0;
  double wall_time_s = 0.0;
};

struct SweepReport {
  std::vector<SweepPairResult> pairs;
  struct Aggregate {
    int n_ions = 0;
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
    double mean_omega = 0.0;
    double mean_wall_time_s = 0.0;
    int n_pairs = 0;
  };
  std::vector<Aggregate> aggregates;
};

// Gate pairs used at a given chain size: all pairs, but edge ions excluded
// for chains of six or more.
std::vector<IonPair> sweep_pairs(int n_ions);

SweepReport scalability_sweep(const ObjectiveSpec& spec_template,
                              const std::vector<int>& n_ions_list, int test_size = 1000,
                              std::uint64_t test_seed = 1);

// Appendix-style dephasing metric on a seeded test set.
double dephasing_metric(const Pulse& pulse, const ModeStructure& modes, IonPair pair,
                        double uncertainty, int test_size = 1000, std::uint64_t seed = 1);

// Fixed evaluation budget split across batch sizes.
struct BatchStudyEntry {
  int batch_size = 0;
  int iterations = 0;
  std::vector<CurvePoint> curve;
  double final_mean_error = 0.0;
  double omega = 0.0;
};

std::vector<BatchStudyEntry> batch_size_study(const std::vector<int>& sizes,
                                              int eval_budget,
                                              const ObjectiveSpec& spec_template,
                                              const ModeStructure& modes, IonPair pair,
                                              int test_size = 1000);

}  // namespace fmforge
