#pragma once

#include <vector>

namespace fmforge {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kHbar = 1.054571817e-34;          // J s (CODATA)
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg (CODATA)

// Harmonic trap holding a linear chain of identical ions.
struct TrapConfig {
  int n_ions = 2;
  double axial_freq = 0.0;       // omega_z, rad/s
  double transverse_freq = 0.0;  // omega_t, rad/s
  double ion_mass = 0.0;         // kg
  double laser_wavevector = 0.0; // effective delta-k of the drive, rad/m

  // 171Yb+ with counter-propagating 355 nm Raman beams; omega_t = 2pi x 2.1 MHz,
  // omega_z = 2pi x 0.4 MHz up to six ions, scaled down as sqrt(6/N) beyond that
  // to stay clear of the zig-zag transition.
  static TrapConfig yb171(int n_ions);

  void validate() const;  // throws ConfigError
};

// Transverse normal-mode data. Mode index 0 is the highest-frequency
// (center-of-mass) mode; frequencies are sorted descending.
struct ModeStructure {
  std::vector<double> mode_freqs;                 // omega_k, rad/s
  std::vector<std::vector<double>> mode_vectors;  // b[k][j], rows orthonormal
  std::vector<std::vector<double>> lamb_dicke;    // eta[k][j]

  int n_modes() const { return static_cast<int>(mode_freqs.size()); }
  int n_ions() const { return n_modes(); }
};

// Dimensionless equilibrium positions along the trap axis, sorted ascending.
// Length unit is (e^2 / 4 pi eps0 M omega_z^2)^(1/3).
std::vector<double> equilibrium_positions(const TrapConfig& trap);

// eta[k][j] = dk * sqrt(hbar / (2 M omega_k)) * b[k][j]
std::vector<std::vector<double>> lamb_dicke_matrix(
    const std::vector<double>& mode_freqs,
    const std::vector<std::vector<double>>& mode_vectors, const TrapConfig& trap);

// Transverse mode frequencies, vectors, and Lamb-Dicke parameters.
// Throws NumericalError if the chain is past the zig-zag transition.
ModeStructure transverse_modes(const TrapConfig& trap);

}  // namespace fmforge
