#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "fermibath/model.hpp"
#include "fermibath/observables.hpp"

namespace fermibath {

struct BathMode {
  double w;  // mode energy
  double g;  // coupling to the collective mode
  double n;  // equilibrium occupation
};

struct DiscreteBath {
  std::vector<BathMode> modes;
  std::size_t N = 0;
  double w_max = 0;
  double delta_w = 0;
  double t_rec = 0;  // 2 pi / delta_w
  ModelParams params;
};

// Midpoint grid w = (k - 1/2) dw, g^2 = w dw J(w). Requires N >= 100, w_max >= 10 gamma.
DiscreteBath discretize_bath(const ModelParams& p, std::size_t N, double w_max);
// Same modes, occupations recomputed for p (frequencies and couplings must match).
DiscreteBath reoccupy(const DiscreteBath& bath, const ModelParams& p);

// sum g^2/w; tends to (g0 gamma/pi) atan(w_max/gamma)
double coupling_sum(const DiscreteBath& bath);
// 2 sum (g^2/w) cos(w t): the real kernel g0 gamma e^{-gamma t} on the grid
double reconstructed_kernel(const DiscreteBath& bath, double t);

// Initial one-body density matrix:
//   product: diag(n0, n_1 .. n_N)
//   dressed: bath modes thermal in the shifted variables a_k + (g_k/w_k) a,
//            uncorrelated with a: diag(0, n_k) + n0 u u^T, u = (1, -g_k/w_k)
enum class InitialCorrelation { product, dressed };
const char* to_string(InitialCorrelation c);

// Real symmetric one-body Hamiltonian and its cached eigendecomposition.
class OneBodyState {
public:
  // Arrowhead Hamiltonian diag(omega, w_k) with first row/column g_k.
  OneBodyState(const DiscreteBath& bath, double system_frequency);
  // Any symmetric matrix; throws Error(invalid_argument) if not symmetric to 1e-14.
  explicit OneBodyState(const Eigen::MatrixXd& hamiltonian);

  std::size_t dimension() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
  Eigen::MatrixXd hamiltonian() const;

  double symmetry_residual() const;
  double orthogonality_residual() const;     // max |V^T V - I|
  double reconstruction_residual() const;    // max |V L V^T - H| / max |H|

  // |U_0j(t)|^2, one row per time.
  Eigen::MatrixXd transition_probabilities(const std::vector<double>& times) const;
  // U_0j(t), one row per time.
  Eigen::MatrixXcd propagator_rows(const std::vector<double>& times) const;
  Eigen::MatrixXcd propagator(double t) const;
  Eigen::MatrixXcd evolve_density(const Eigen::MatrixXcd& rho0, double t) const;

private:
  void diagonalize(Eigen::MatrixXd h);

  Eigen::MatrixXd dense_;  // kept only for the generic constructor
  double omega_ = 0;
  Eigen::VectorXd diag_, coupling_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

Eigen::MatrixXd initial_density(const DiscreteBath& bath, double n0, InitialCorrelation c);

// One eigendecomposition per (Omega, g0, gamma, N, w_max); occupations supplied per call.
class BathOracle {
public:
  // system_frequency <= 0 selects bare_frequency(p).
  BathOracle(const ModelParams& p, std::size_t N, double w_max, double system_frequency = 0);

  const DiscreteBath& bath() const { return bath_; }
  const OneBodyState& state() const { return state_; }
  double system_frequency() const { return omega_; }

  // p must share Omega, g0, gamma with the construction parameters.
  OccupationTrajectory propagate(const ModelParams& p, const std::vector<double>& times,
                                 InitialCorrelation c = InitialCorrelation::product) const;
  // Same, reusing precomputed propagator rows.
  OccupationTrajectory propagate(const ModelParams& p, const std::vector<double>& times,
                                 const Eigen::MatrixXcd& rows, InitialCorrelation c) const;

private:
  DiscreteBath bath_;
  double omega_;
  OneBodyState state_;
};

// Warns for times beyond t_rec/2.
OccupationTrajectory propagate_occupation(const DiscreteBath& bath, const ModelParams& p,
                                          const std::vector<double>& times,
                                          InitialCorrelation c = InitialCorrelation::product);

struct FdrResidual {
  double emission = 0;    // K*(t-tau) vs sum <F+(t) F(tau)>/(w n), relative
  double absorption = 0;  // K(t-tau) vs sum <F(t) F+(tau)>/(w (1 -+ n)), relative
  double anomalous = 0;   // max |<F+ F+>|, |<F F>|
  std::size_t emission_modes = 0;
  std::size_t absorption_modes = 0;
};
// Throws Error(domain) when no mode qualifies for either relation.
FdrResidual kernel_fdr_check(const DiscreteBath& bath, double t, double tau);

}  // namespace fermibath
