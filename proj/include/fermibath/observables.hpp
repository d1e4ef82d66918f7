#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "fermibath/model.hpp"
#include "fermibath/quadrature.hpp"
#include "fermibath/response.hpp"

namespace fermibath {

// plus_minus: <F+ F> with weight n(w); minus_plus: <F F+> with weight 1 -+ n(w).
enum class Ordering { plus_minus, minus_plus };

enum class OccupationMethod { exact_quadrature, weak_coupling, oracle };
const char* to_string(OccupationMethod m);

struct OccupationTrajectory {
  std::vector<double> times;
  std::vector<double> values;
  OccupationMethod method = OccupationMethod::exact_quadrature;
  ModelParams params;
};

struct TransportTrajectory {
  std::vector<double> times;
  std::vector<double> friction;
  std::vector<double> diffusion_plus;
  std::vector<double> diffusion_minus;
  std::vector<bool> asymptotic;  // |A|^2 underflowed, asymptotic values reported
};

struct EquilibriumSummary {
  double n_infinity = 0;
  double lambda_infinity = 0;
  double D_plus_infinity = 0;   // lambda n
  double D_minus_infinity = 0;  // lambda times the asymptotic <F F+> moment
  double D_minus_detailed_balance = 0;  // lambda (1 -+ n)
  double reference_thermal = 0; // occupation_factor(Omega)
  double low_T_expansion = 0;   // NaN above T = 0.2 Omega
  double sum_rule = 0;          // integral of the unit-weight asymptotic moment
};

struct NoiseMoments {
  double plus = 0, plus_rate = 0;
  double minus = 0, minus_rate = 0;
  double error_estimate = 0;
  std::size_t panels_used = 0;

  double moment(Ordering o) const { return o == Ordering::plus_minus ? plus : minus; }
  double rate(Ordering o) const { return o == Ordering::plus_minus ? plus_rate : minus_rate; }
};

// Quadrature settings used for the exact moments at time t: cutoff, breakpoints
// around the resonance and the Fermi edge, oscillation hint.
QuadratureSpec moment_spec(double t, const ModelParams& p, const CharacteristicRoots& r,
                           const QuadratureSpec& base);

// Both orderings and their time derivatives in one quadrature pass.
NoiseMoments noise_moments(double t, const ModelParams& p, const CharacteristicRoots& r,
                           const QuadratureSpec& spec = {});
double noise_moment(double t, Ordering o, const ModelParams& p, const CharacteristicRoots& r,
                    const QuadratureSpec& spec = {});
double noise_moment_rate(double t, Ordering o, const ModelParams& p, const CharacteristicRoots& r,
                         const QuadratureSpec& spec = {});
// Same integral with unit weight instead of n(w).
double spectral_norm(double t, const ModelParams& p, const CharacteristicRoots& r,
                     const QuadratureSpec& spec = {});

double occupation(double t, const ModelParams& p, const CharacteristicRoots& r,
                  const QuadratureSpec& spec = {});
double occupation_asymptotic(const ModelParams& p, const CharacteristicRoots& r,
                             const QuadratureSpec& spec = {});
// t -> infinity limit of noise_moment; unit weight gives the sum rule.
double asymptotic_moment(Ordering o, const ModelParams& p, const CharacteristicRoots& r,
                         const QuadratureSpec& spec = {});
double asymptotic_spectral_norm(const ModelParams& p, const CharacteristicRoots& r,
                                const QuadratureSpec& spec = {});

// Weak-coupling coefficients f1..f6 (rational in w). Requires g0 < 1.
std::array<cplx, 6> f_constants(double w, const ModelParams& p);
// z1 = -gamma + i g0 gamma, z2 = i Omega - g0 Omega
CharacteristicRoots weak_coupling_roots(const ModelParams& p);
double occupation_weak_coupling(double t, const ModelParams& p, const QuadratureSpec& spec = {});
double occupation_weak_coupling_asymptotic(const ModelParams& p, const QuadratureSpec& spec = {});
// n0 e^{-2 g0 Omega t} + n_inf (1 - e^{-2 g0 Omega t})
double occupation_weak_coupling_compact(double t, const ModelParams& p,
                                        const QuadratureSpec& spec = {});

double low_temperature_asymptote(const ModelParams& p);
// tanh(Omega / 2T)
double statistics_ratio(double T, double Omega);
double thermal_reference(const ModelParams& p);

struct FrictionValue {
  double value = 0;
  bool asymptotic = false;
};
FrictionValue friction(double t, const CharacteristicRoots& r, const ModelParams& p);
double friction_asymptotic(const CharacteristicRoots& r);

// D(t) = lambda(t) m(t) + m'(t)/2 for the moment m of the given ordering.
struct DiffusionValue {
  double value = 0;
  bool asymptotic = false;
};
DiffusionValue diffusion(double t, Ordering o, const CharacteristicRoots& r, const ModelParams& p,
                         const QuadratureSpec& spec = {});

struct TransportPoint {
  double time = 0;
  double friction = 0;
  double diffusion_plus = 0;
  double diffusion_minus = 0;
  bool asymptotic = false;
};
TransportPoint transport_point(double t, const ModelParams& p, const CharacteristicRoots& r,
                               const QuadratureSpec& spec = {});

EquilibriumSummary equilibrium_summary(const ModelParams& p, const CharacteristicRoots& r,
                                       const QuadratureSpec& spec = {});

// 0.05/gamma steps near 0, growing geometrically to min(0.1/(g0 Omega), t_max/100).
std::vector<double> default_time_grid(const ModelParams& p, double t_max);

// jobs > 1 evaluates time points on that many threads; output order is fixed.
OccupationTrajectory occupation_trajectory(const std::vector<double>& times, const ModelParams& p,
                                           OccupationMethod method, const QuadratureSpec& spec = {},
                                           unsigned jobs = 1);
TransportTrajectory transport_trajectory(const std::vector<double>& times, const ModelParams& p,
                                         const QuadratureSpec& spec = {}, unsigned jobs = 1);

// Largest excursion outside [0, 1] (Fermi) or below 0 (Bose); 0 when within bounds.
double bound_violation(const OccupationTrajectory& traj);

}  // namespace fermibath
