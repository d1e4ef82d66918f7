#include "fermibath/oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "fermibath/diagnostics.hpp"
#include "fermibath/errors.hpp"

namespace fermibath {

namespace {

bool same_hamiltonian(const ModelParams& a, const ModelParams& b) {
  return a.Omega == b.Omega && a.g0 == b.g0 && a.gamma == b.gamma;
}

}  // namespace

const char* to_string(InitialCorrelation c) {
  return c == InitialCorrelation::product ? "product" : "dressed";
}

DiscreteBath discretize_bath(const ModelParams& p, std::size_t N, double w_max) {
  validate(p);
  if (N < 100) throw Error(ErrorCode::invalid_argument, "discretize_bath: N must be >= 100");
  if (!(w_max >= 10 * p.gamma))
    throw Error(ErrorCode::invalid_argument, "discretize_bath: w_max must be >= 10 gamma");
  DiscreteBath bath;
  bath.N = N;
  bath.w_max = w_max;
  bath.delta_w = w_max / static_cast<double>(N);
  bath.t_rec = 2 * std::numbers::pi / bath.delta_w;
  bath.params = p;
  bath.modes.reserve(N);
  for (std::size_t k = 1; k <= N; ++k) {
    const double w = (static_cast<double>(k) - 0.5) * bath.delta_w;
    const double g = std::sqrt(w * bath.delta_w * spectral_density(w, p));
    bath.modes.push_back({w, g, occupation_factor(w, p)});
  }
  return bath;
}

DiscreteBath reoccupy(const DiscreteBath& bath, const ModelParams& p) {
  if (!same_hamiltonian(bath.params, p))
    throw Error(ErrorCode::invalid_argument, "reoccupy: Omega, g0 and gamma must match the bath");
  validate(p);
  DiscreteBath out = bath;
  out.params = p;
  for (auto& m : out.modes) m.n = occupation_factor(m.w, p);
  return out;
}

double coupling_sum(const DiscreteBath& bath) {
  double s = 0;
  for (const auto& m : bath.modes) s += m.g * m.g / m.w;
  return s;
}

double reconstructed_kernel(const DiscreteBath& bath, double t) {
  double s = 0;
  for (const auto& m : bath.modes) s += m.g * m.g / m.w * std::cos(m.w * t);
  return 2 * s;
}

OneBodyState::OneBodyState(const DiscreteBath& bath, double system_frequency) {
  const Eigen::Index n = static_cast<Eigen::Index>(bath.modes.size());
  omega_ = system_frequency;
  diag_.resize(n);
  coupling_.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    diag_[k] = bath.modes[k].w;
    coupling_[k] = bath.modes[k].g;
  }
  diagonalize(hamiltonian());
}

OneBodyState::OneBodyState(const Eigen::MatrixXd& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0)
    throw Error(ErrorCode::invalid_argument, "one-body Hamiltonian must be square and non-empty");
  const double scale = std::max(hamiltonian.cwiseAbs().maxCoeff(), 1e-300);
  if ((hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
    throw Error(ErrorCode::invalid_argument, "one-body Hamiltonian is not symmetric");
  dense_ = hamiltonian;
  diagonalize(hamiltonian);
}

Eigen::MatrixXd OneBodyState::hamiltonian() const {
  if (dense_.size() > 0) return dense_;
  const Eigen::Index n = diag_.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
  h(0, 0) = omega_;
  for (Eigen::Index k = 0; k < n; ++k) {
    h(k + 1, k + 1) = diag_[k];
    h(0, k + 1) = coupling_[k];
    h(k + 1, 0) = coupling_[k];
  }
  return h;
}

void OneBodyState::diagonalize(Eigen::MatrixXd h) {
  const lapack_int n = static_cast<lapack_int>(h.rows());
  values_.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, h.data(), n, values_.data());
  if (info != 0) {
    std::ostringstream os;
    os << "symmetric eigendecomposition failed (info = " << info << ")";
    throw Error(ErrorCode::numerical, os.str());
  }
  vectors_ = std::move(h);
}

double OneBodyState::symmetry_residual() const {
  const Eigen::MatrixXd h = hamiltonian();
  return (h - h.transpose()).cwiseAbs().maxCoeff();
}

double OneBodyState::orthogonality_residual() const {
  const Eigen::Index n = vectors_.rows();
  return (vectors_.transpose() * vectors_ - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double OneBodyState::reconstruction_residual() const {
  const Eigen::MatrixXd h = hamiltonian();
  const Eigen::MatrixXd r = vectors_ * values_.asDiagonal() * vectors_.transpose() - h;
  return r.cwiseAbs().maxCoeff() / h.cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd OneBodyState::propagator_rows(const std::vector<double>& times) const {
  const Eigen::Index nt = static_cast<Eigen::Index>(times.size());
  const Eigen::Index m = vectors_.rows();
  Eigen::MatrixXd c(nt, m), s(nt, m);
  for (Eigen::Index i = 0; i < nt; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const double phase = values_[k] * times[i];
      c(i, k) = vectors_(0, k) * std::cos(phase);
      s(i, k) = vectors_(0, k) * std::sin(phase);
    }
  }
  Eigen::MatrixXcd rows(nt, m);
  rows.real() = c * vectors_.transpose();
  rows.imag() = -(s * vectors_.transpose());
  return rows;
}

Eigen::MatrixXd OneBodyState::transition_probabilities(const std::vector<double>& times) const {
  return propagator_rows(times).cwiseAbs2();
}

Eigen::MatrixXcd OneBodyState::propagator(double t) const {
  Eigen::VectorXcd phase(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) phase[k] = std::polar(1.0, -values_[k] * t);
  const Eigen::MatrixXcd v = vectors_.cast<std::complex<double>>();
  return v * phase.asDiagonal() * v.transpose();
}

Eigen::MatrixXcd OneBodyState::evolve_density(const Eigen::MatrixXcd& rho0, double t) const {
  const Eigen::MatrixXcd u = propagator(t);
  return u * rho0 * u.adjoint();
}

Eigen::MatrixXd initial_density(const DiscreteBath& bath, double n0, InitialCorrelation c) {
  const Eigen::Index n = static_cast<Eigen::Index>(bath.modes.size());
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index k = 0; k < n; ++k) rho(k + 1, k + 1) = bath.modes[k].n;
  if (c == InitialCorrelation::product) {
    rho(0, 0) = n0;
  } else {
    Eigen::VectorXd u(n + 1);
    u[0] = 1;
    for (Eigen::Index k = 0; k < n; ++k) u[k + 1] = -bath.modes[k].g / bath.modes[k].w;
    rho += n0 * u * u.transpose();
  }
  return rho;
}

BathOracle::BathOracle(const ModelParams& p, std::size_t N, double w_max, double system_frequency)
    : bath_(discretize_bath(p, N, w_max)),
      omega_(system_frequency > 0 ? system_frequency : bare_frequency(p)),
      state_(bath_, omega_) {}

OccupationTrajectory BathOracle::propagate(const ModelParams& p, const std::vector<double>& times,
                                           InitialCorrelation c) const {
  return propagate(p, times, state_.propagator_rows(times), c);
}

OccupationTrajectory BathOracle::propagate(const ModelParams& p, const std::vector<double>& times,
                                           const Eigen::MatrixXcd& rows, InitialCorrelation c) const {
  const DiscreteBath bath = reoccupy(bath_, p);
  if (rows.rows() != static_cast<Eigen::Index>(times.size()) ||
      rows.cols() != static_cast<Eigen::Index>(bath.modes.size() + 1))
    throw Error(ErrorCode::invalid_argument, "oracle: propagator rows do not match the time grid");
  for (double t : times) {
    if (t > 0.5 * bath.t_rec) {
      std::ostringstream os;
      os << "oracle times beyond t_rec/2 = " << 0.5 * bath.t_rec << " are affected by recurrences";
      warn(os.str());
      break;
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(bath.modes.size());
  Eigen::VectorXd occ(n + 1), u(n + 1);
  occ[0] = c == InitialCorrelation::product ? p.n0 : 0.0;
  u[0] = 1;
  for (Eigen::Index k = 0; k < n; ++k) {
    occ[k + 1] = bath.modes[k].n;
    u[k + 1] = -bath.modes[k].g / bath.modes[k].w;
  }
  Eigen::VectorXd values = rows.cwiseAbs2() * occ;
  if (c == InitialCorrelation::dressed) values += p.n0 * (rows * u.cast<std::complex<double>>()).cwiseAbs2();

  OccupationTrajectory out;
  out.times = times;
  out.values.assign(values.data(), values.data() + values.size());
  out.method = OccupationMethod::oracle;
  out.params = p;
  return out;
}

OccupationTrajectory propagate_occupation(const DiscreteBath& bath, const ModelParams& p,
                                          const std::vector<double>& times, InitialCorrelation c) {
  if (!same_hamiltonian(bath.params, p))
    throw Error(ErrorCode::invalid_argument, "propagate_occupation: parameters do not match the bath");
  const DiscreteBath occupied = reoccupy(bath, p);
  const OneBodyState state(occupied, bare_frequency(p));
  const Eigen::MatrixXcd rows = state.propagator_rows(times);
  Eigen::MatrixXd rho0 = initial_density(occupied, p.n0, c);
  for (double t : times) {
    if (t > 0.5 * bath.t_rec) {
      warn("oracle times beyond t_rec/2 are affected by recurrences");
      break;
    }
  }
  OccupationTrajectory out;
  out.times = times;
  out.method = OccupationMethod::oracle;
  out.params = p;
  out.values.resize(times.size());
  const Eigen::MatrixXcd r0 = rho0.cast<std::complex<double>>();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Eigen::RowVectorXcd row = rows.row(i);
    out.values[i] = std::real((row.conjugate() * r0 * row.transpose())(0, 0));
  }
  return out;
}

FdrResidual kernel_fdr_check(const DiscreteBath& bath, double t, double tau) {
  const bool fermi = bath.params.statistics == BathStatistics::fermi;
  FdrResidual out;
  std::complex<double> lhs1 = 0, rhs1 = 0, lhs2 = 0, rhs2 = 0;
  double scale1 = 0, scale2 = 0;
  for (const auto& m : bath.modes) {
    const double k = m.g * m.g / m.w;
    const std::complex<double> up = std::polar(1.0, m.w * t), down = std::polar(1.0, -m.w * tau);
    const double vac = fermi ? 1 - m.n : 1 + m.n;
    // the bath state conserves particle number: no pairing amplitude
    const double kappa = 0.0;
    out.anomalous = std::max(out.anomalous, m.g * m.g * std::abs(kappa));
    if (m.n > 1e-12) {
      const std::complex<double> corr = m.g * m.g * up * down * m.n;  // <F+(t) F(tau)>
      lhs1 += k * std::polar(1.0, m.w * (t - tau));
      rhs1 += corr / (m.w * m.n);
      scale1 += k;
      ++out.emission_modes;
    }
    if (vac > 1e-12) {
      const std::complex<double> corr = m.g * m.g * std::conj(up) * std::conj(down) * vac;  // <F(t) F+(tau)>
      lhs2 += k * std::polar(1.0, -m.w * (t - tau));
      rhs2 += corr / (m.w * vac);
      scale2 += k;
      ++out.absorption_modes;
    }
  }
  if (out.emission_modes == 0 || out.absorption_modes == 0)
    throw Error(ErrorCode::domain, "kernel_fdr_check: no bath mode qualifies for one of the relations");
  out.emission = std::abs(lhs1 - rhs1) / scale1;
  out.absorption = std::abs(lhs2 - rhs2) / scale2;
  return out;
}

}  // namespace fermibath
