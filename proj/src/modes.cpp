#include "fmforge/modes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fmforge/errors.hpp"

namespace fmforge {

TrapConfig TrapConfig::yb171(int n_ions) {
  TrapConfig t;
  t.n_ions = n_ions;
  t.transverse_freq = kTwoPi * 2.1e6;
  double fz = 0.4e6;
  if (n_ions > 6) fz *= std::sqrt(6.0 / n_ions);
  t.axial_freq = kTwoPi * fz;
  t.ion_mass = 170.936 * kAtomicMassUnit;
  t.laser_wavevector = std::sqrt(2.0) * kTwoPi / 355e-9;
  return t;
}

void TrapConfig::validate() const {
  if (n_ions < 2) throw ConfigError("trap: n_ions must be >= 2");
  if (!(axial_freq > 0.0)) throw ConfigError("trap: axial_freq must be > 0");
  if (!(transverse_freq > axial_freq))
    throw ConfigError("trap: transverse_freq must exceed axial_freq");
  if (!(ion_mass > 0.0)) throw ConfigError("trap: ion_mass must be > 0");
  if (!(laser_wavevector > 0.0)) throw ConfigError("trap: laser_wavevector must be > 0");
}

namespace {

// Gradient of the dimensionless potential sum(u_i^2)/2 + sum_{i<j} 1/|u_i-u_j|.
void chain_gradient(const Eigen::VectorXd& u, Eigen::VectorXd& g) {
  const int n = static_cast<int>(u.size());
  g = u;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = u[i] - u[j];
      g[i] -= (d > 0.0 ? 1.0 : -1.0) / (d * d);
    }
  }
}

void chain_hessian(const Eigen::VectorXd& u, Eigen::MatrixXd& h) {
  const int n = static_cast<int>(u.size());
  h.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = std::abs(u[i] - u[j]);
      const double w = 2.0 / (d * d * d);
      h(i, i) += w;
      h(i, j) -= w;
    }
  }
}

}  // namespace

std::vector<double> equilibrium_positions(const TrapConfig& trap) {
  trap.validate();
  const int n = trap.n_ions;

  // Uniform-spacing seed; 2.0/n^0.56 approximates the minimum spacing of a
  // Coulomb chain well enough for Newton to converge from it.
  Eigen::VectorXd u(n);
  const double spacing = 2.0 / std::pow(static_cast<double>(n), 0.56);
  for (int i = 0; i < n; ++i) u[i] = spacing * (i - 0.5 * (n - 1));

  Eigen::VectorXd g(n);
  Eigen::MatrixXd h(n, n);
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    chain_gradient(u, g);
    if (g.lpNorm<Eigen::Infinity>() < 1e-13) {
      converged = true;
      break;
    }
    chain_hessian(u, h);
    Eigen::VectorXd step = h.ldlt().solve(g);
    // Damp so no ion crosses a neighbor: keep every gap at >= 1/4 its size.
    double scale = 1.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double gap = u[i + 1] - u[i];
      const double shrink = step[i + 1] - step[i];  // step is subtracted below
      if (shrink > 0.0) scale = std::min(scale, 0.75 * gap / shrink);
    }
    u -= scale * step;
  }
  if (!converged)
    throw NumericalError("equilibrium_positions: Newton failed to converge for n_ions=" +
                         std::to_string(n));

  // Symmetrize: the exact solution is antisymmetric under index reversal.
  Eigen::VectorXd us(n);
  for (int i = 0; i < n; ++i) us[i] = 0.5 * (u[i] - u[n - 1 - i]);
  chain_gradient(us, g);
  if (g.lpNorm<Eigen::Infinity>() >= 1e-12)
    throw NumericalError("equilibrium_positions: residual force above tolerance");

  std::vector<double> out(us.data(), us.data() + n);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<double>> lamb_dicke_matrix(
    const std::vector<double>& mode_freqs,
    const std::vector<std::vector<double>>& mode_vectors, const TrapConfig& trap) {
  const int n = static_cast<int>(mode_freqs.size());
  std::vector<std::vector<double>> eta(n, std::vector<double>(n, 0.0));
  for (int k = 0; k < n; ++k) {
    const double scale =
        trap.laser_wavevector * std::sqrt(kHbar / (2.0 * trap.ion_mass * mode_freqs[k]));
    for (int j = 0; j < n; ++j) eta[k][j] = scale * mode_vectors[k][j];
  }
  return eta;
}

ModeStructure transverse_modes(const TrapConfig& trap) {
  trap.validate();
  const int n = trap.n_ions;
  const std::vector<double> u = equilibrium_positions(trap);
  const double a2 = (trap.transverse_freq / trap.axial_freq) *
                    (trap.transverse_freq / trap.axial_freq);

  // Transverse coupling matrix in units of omega_z^2.
  Eigen::MatrixXd A(n, n);
  A.setZero();
  for (int i = 0; i < n; ++i) {
    A(i, i) = a2;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = std::abs(u[i] - u[j]);
      const double w = 1.0 / (d * d * d);
      A(i, i) -= w;
      A(i, j) = w;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw NumericalError("transverse_modes: eigensolver failed");

  ModeStructure m;
  m.mode_freqs.resize(n);
  m.mode_vectors.assign(n, std::vector<double>(n, 0.0));
  // Eigen sorts ascending; we want descending so index 0 is the c.m. mode.
  for (int k = 0; k < n; ++k) {
    const int src = n - 1 - k;
    const double lambda = es.eigenvalues()[src];
    if (!(lambda > 0.0))
      throw NumericalError(
          "transverse_modes: non-positive transverse eigenvalue; trap is past "
          "the zig-zag transition (raise transverse_freq or lower axial_freq)");
    m.mode_freqs[k] = trap.axial_freq * std::sqrt(lambda);
    Eigen::VectorXd v = es.eigenvectors().col(src);
    // Sign convention: first nonzero component positive.
    for (int j = 0; j < n; ++j) {
      if (std::abs(v[j]) > 1e-12) {
        if (v[j] < 0.0) v = -v;
        break;
      }
    }
    for (int j = 0; j < n; ++j) m.mode_vectors[k][j] = v[j];
  }

  m.lamb_dicke = lamb_dicke_matrix(m.mode_freqs, m.mode_vectors, trap);
  return m;
}

}  // namespace fmforge
