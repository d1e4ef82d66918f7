#include "fermibath/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fermibath/diagnostics.hpp"
#include "fermibath/errors.hpp"
#include "parallel.hpp"

namespace fermibath {

namespace {

constexpr cplx I(0.0, 1.0);
constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6;
constexpr double kZeta3 = 1.2020569031595942853997381615114;
constexpr double kZeta4 = std::numbers::pi * std::numbers::pi * std::numbers::pi * std::numbers::pi / 90;

enum class Weight { occupied, vacant, unit };

double weight(Weight k, double w, const ModelParams& p) {
  switch (k) {
    case Weight::occupied: return occupation_factor(w, p);
    case Weight::vacant: return vacancy_factor(w, p);
    default: return 1.0;
  }
}

cplx weight(Weight k, cplx w, const ModelParams& p) {
  switch (k) {
    case Weight::occupied: return occupation_factor(w, p);
    case Weight::vacant: return vacancy_factor(w, p);
    default: return 1.0;
  }
}

double coupling_weight_real(double w, const ModelParams& p) {
  const double g2 = p.gamma * p.gamma;
  return p.g0 / std::numbers::pi * g2 * w / (g2 + w * w);
}

void add_cluster(std::vector<double>& out, double center, double width, double w_max) {
  if (!(width > 0)) return;
  if (center > 0 && center < w_max) out.push_back(center);
  for (double f : {0.5, 2.0, 8.0, 32.0, 128.0, 512.0}) {
    for (double x : {center - f * width, center + f * width})
      if (x > 0 && x < w_max) out.push_back(x);
  }
}

std::vector<double> breakpoints(const ModelParams& p, const CharacteristicRoots& r, double w_max) {
  std::vector<double> out;
  add_cluster(out, r.z2.imag(), std::abs(r.z2.real()), w_max);
  if (p.statistics == BathStatistics::fermi && p.mu > 0) {
    if (p.T > 0)
      add_cluster(out, p.mu, p.T, w_max);
    else if (p.mu < w_max)
      out.push_back(p.mu);
  }
  if (p.T > 0)
    for (double f : {1.0, 4.0, 16.0})
      if (f * p.T < w_max) out.push_back(f * p.T);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Weighted integrals of |b|^2 and d|b|^2/dt, b = -B*_w(t); component pairs per weight.
template <int NW>
QuadratureResultN<2 * NW> weighted_moments(double t, const std::array<Weight, NW>& weights,
                                           const ModelParams& p, const CharacteristicRoots& r,
                                           const QuadratureSpec& base) {
  constexpr int K = 2 * NW;
  const QuadratureSpec spec = moment_spec(t, p, r, base);
  const ResponseFractions fr(r, p);
  const cplx z1 = r.z1, z2 = r.z2;
  const cplx e1 = std::exp(t * z1), e2 = std::exp(t * z2);

  auto f = [&](double w) {
    const double rho = coupling_weight_real(w, p);
    const cplx X = fr.steady(w), a1 = fr.c1(w) * e1, a2 = fr.c2(w) * e2;
    const cplx ph = std::polar(1.0, w * t);
    const cplx b = X * ph + a1 + a2;
    const cplx bd = I * w * X * ph + z1 * a1 + z2 * a2;
    const double m = std::norm(b), md = 2 * std::real(std::conj(b) * bd);
    QVec<K> out;
    for (int j = 0; j < NW; ++j) {
      const double s = rho * weight(weights[j], w, p);
      out[2 * j] = s * m;
      out[2 * j + 1] = s * md;
    }
    return out;
  };

  SplitTail<K> tail;
  tail.frequency = t;
  tail.smooth = [&](double w) {
    const double rho = coupling_weight_real(w, p);
    const cplx X = fr.steady(w), a1 = fr.c1(w) * e1, a2 = fr.c2(w) * e2;
    const cplx Y = a1 + a2, Yd = z1 * a1 + z2 * a2;
    const double m = std::norm(X) + std::norm(Y), md = 2 * std::real(std::conj(Y) * Yd);
    QVec<K> out;
    for (int j = 0; j < NW; ++j) {
      const double s = rho * weight(weights[j], w, p);
      out[2 * j] = s * m;
      out[2 * j + 1] = s * md;
    }
    return out;
  };
  tail.oscillating = [&](cplx w) {
    // conj(Y(conj w)) continues conj(Y) off the real axis
    const cplx wc = std::conj(w);
    const cplx a1 = std::conj(fr.c1(wc) * e1), a2 = std::conj(fr.c2(wc) * e2);
    const cplx Ybar = a1 + a2;
    const cplx Ydbar = std::conj(z1) * a1 + std::conj(z2) * a2;
    const cplx X = fr.steady(w);
    const cplx rho = coupling_weight(w, p);
    const cplx qm = 2.0 * rho * X * Ybar;
    const cplx qd = 2.0 * rho * X * (Ydbar + I * w * Ybar);
    QCVec<K> out;
    for (int j = 0; j < NW; ++j) {
      const cplx s = weight(weights[j], w, p);
      out[2 * j] = s * qm;
      out[2 * j + 1] = s * qd;
    }
    return out;
  };
  auto res = integrate_semi_infinite<K>(f, spec, &tail);
  require_converged(res, "noise moment");
  return res;
}

template <int NW>
QuadratureResultN<NW> asymptotic_moments(const std::array<Weight, NW>& weights, const ModelParams& p,
                                         const CharacteristicRoots& r, const QuadratureSpec& base) {
  if (!(p.g0 > 0))
    throw Error(ErrorCode::domain, "asymptotic occupation requires g0 > 0 (no relaxation at zero coupling)");
  const QuadratureSpec spec = moment_spec(0.0, p, r, base);
  const ResponseFractions fr(r, p);
  auto f = [&](double w) {
    const double v = coupling_weight_real(w, p) * std::norm(fr.steady(w));
    QVec<NW> out;
    for (int j = 0; j < NW; ++j) out[j] = v * weight(weights[j], w, p);
    return out;
  };
  auto res = integrate_semi_infinite<NW>(f, spec);
  require_converged(res, "asymptotic occupation");
  return res;
}

Weight vacancy_or_occupation(Ordering o) {
  return o == Ordering::plus_minus ? Weight::occupied : Weight::vacant;
}

double log_amplitude(double t, const CharacteristicRoots& r, const ModelParams& p) {
  // log|A*(t)| without underflow: factor out e^{z2 t}
  const cplx shift(p.gamma, -p.g0 * p.gamma);
  const cplx d = r.z1 - r.z2;
  const cplx c1 = (r.z1 + shift) / d, c2 = -(r.z2 + shift) / d;
  const cplx inner = c1 * std::exp(t * d) + c2;
  return r.z2.real() * t + std::log(std::abs(inner));
}

}  // namespace

const char* to_string(OccupationMethod m) {
  switch (m) {
    case OccupationMethod::exact_quadrature: return "exact-quadrature";
    case OccupationMethod::weak_coupling: return "weak-coupling";
    default: return "oracle";
  }
}

QuadratureSpec moment_spec(double t, const ModelParams& p, const CharacteristicRoots& r,
                           const QuadratureSpec& base) {
  QuadratureSpec s = base;
  s.oscillation_time = t;
  s.memory_time = 1 / p.gamma;
  if (base.w_max <= 0) {
    // the contour tail needs W to the right of every pole of the continued integrand
    s.w_max = std::max({3 * p.gamma, 10 * p.Omega, p.mu + 10 * p.T, 2 * p.mu,
                        2 * std::abs(r.z1.imag()), 2 * std::abs(r.z2.imag())});
  }
  s.resolved_band = 0;
  s.tail_rule = TailRule::mapped;
  const auto bp = breakpoints(p, r, s.w_max);
  s.breakpoints.insert(s.breakpoints.end(), bp.begin(), bp.end());
  return s;
}

NoiseMoments noise_moments(double t, const ModelParams& p, const CharacteristicRoots& r,
                           const QuadratureSpec& spec) {
  if (t < 0) throw Error(ErrorCode::invalid_argument, "noise moment: t must be >= 0");
  NoiseMoments out;
  if (p.g0 == 0) return out;
  auto res = weighted_moments<2>(t, {Weight::occupied, Weight::vacant}, p, r, spec);
  out.plus = res.value[0];
  out.plus_rate = res.value[1];
  out.minus = res.value[2];
  out.minus_rate = res.value[3];
  out.error_estimate = res.error_estimate.maxCoeff();
  out.panels_used = res.panels_used;
  return out;
}

double noise_moment(double t, Ordering o, const ModelParams& p, const CharacteristicRoots& r,
                    const QuadratureSpec& spec) {
  if (t < 0) throw Error(ErrorCode::invalid_argument, "noise moment: t must be >= 0");
  if (p.g0 == 0) return 0.0;
  return weighted_moments<1>(t, {vacancy_or_occupation(o)}, p, r, spec).value[0];
}

double noise_moment_rate(double t, Ordering o, const ModelParams& p, const CharacteristicRoots& r,
                         const QuadratureSpec& spec) {
  if (t < 0) throw Error(ErrorCode::invalid_argument, "noise moment: t must be >= 0");
  if (p.g0 == 0) return 0.0;
  return weighted_moments<1>(t, {vacancy_or_occupation(o)}, p, r, spec).value[1];
}

double spectral_norm(double t, const ModelParams& p, const CharacteristicRoots& r,
                     const QuadratureSpec& spec) {
  if (t < 0) throw Error(ErrorCode::invalid_argument, "spectral norm: t must be >= 0");
  if (p.g0 == 0) return 0.0;
  return weighted_moments<1>(t, {Weight::unit}, p, r, spec).value[0];
}

double occupation(double t, const ModelParams& p, const CharacteristicRoots& r,
                  const QuadratureSpec& spec) {
  const double a2 = std::norm(amplitude(t, r, p));
  return a2 * p.n0 + noise_moment(t, Ordering::plus_minus, p, r, spec);
}

double occupation_asymptotic(const ModelParams& p, const CharacteristicRoots& r,
                             const QuadratureSpec& spec) {
  return asymptotic_moments<1>({Weight::occupied}, p, r, spec).value[0];
}

double asymptotic_moment(Ordering o, const ModelParams& p, const CharacteristicRoots& r,
                         const QuadratureSpec& spec) {
  return asymptotic_moments<1>({vacancy_or_occupation(o)}, p, r, spec).value[0];
}

double asymptotic_spectral_norm(const ModelParams& p, const CharacteristicRoots& r,
                                const QuadratureSpec& spec) {
  return asymptotic_moments<1>({Weight::unit}, p, r, spec).value[0];
}

std::array<cplx, 6> f_constants(double w, const ModelParams& p) {
  if (w < 0) throw Error(ErrorCode::domain, "f_constants: w must be >= 0");
  if (!(p.g0 < 1)) throw Error(ErrorCode::domain, "f_constants: requires g0 < 1");
  const double g = p.g0, ga = p.gamma, Om = p.Omega;
  const double scale = w + ga + Om;
  auto den = [&](cplx d, int degree) {
    if (std::abs(d) <= 1e-14 * std::pow(scale, degree)) {
      std::ostringstream os;
      os << "f_constants: vanishing denominator at w = " << w;
      throw Error(ErrorCode::domain, os.str());
    }
    return d;
  };
  const double q1 = w * w - 2 * g * w * ga + (1 + g * g) * ga * ga;   // |w + i z1|^2
  const double q2 = w * w - 2 * w * Om + (1 + g * g) * Om * Om;       // |w + i z2|^2
  const double q12 = (1 + g * g) * ga * ga - 4 * g * ga * Om + (1 + g * g) * Om * Om;  // |z1 - z2|^2
  den(q1, 2);
  den(q2, 2);
  den(q12, 2);
  std::array<cplx, 6> f;
  f[0] = (w * w + ga * ga) / (q1 * q2);
  f[1] = g * g * ga * ga / (q1 * q12);
  f[2] = (ga * ga - 2 * g * ga * Om + (1 + g * g) * Om * Om) / (q2 * q12);
  f[3] = I * g * (w + I * ga) * ga /
         (q1 * den(ga - I * g * ga - (-I + g) * Om, 1) * den(w + I * (I + g) * Om, 1));
  f[4] = (-I * w + ga) * (ga - (-I + g) * Om) /
         (den(w - (-I + g) * ga, 1) * den((I + g) * ga + (-1.0 - I * g) * Om, 1) * q2);
  f[5] = g * ga * (ga - (I + g) * Om) /
         (den(I * w + ga - I * g * ga, 1) * den(w + I * (I + g) * Om, 1) * q12);
  return f;
}

CharacteristicRoots weak_coupling_roots(const ModelParams& p) {
  return {cplx(-p.gamma, p.g0 * p.gamma), cplx(-p.g0 * p.Omega, p.Omega)};
}

namespace {

QuadratureSpec weak_spec(double t, const ModelParams& p, const QuadratureSpec& base) {
  QuadratureSpec s = base;
  s.oscillation_time = t;
  s.memory_time = 1 / p.gamma;
  if (base.w_max <= 0) s.w_max = default_w_max(p.gamma, p.Omega, p.T, p.mu);
  s.resolved_band = 3 * p.gamma;
  s.tail_rule = t > 0 ? TailRule::envelope : TailRule::mapped;
  s.tail_power = 3.0;
  const auto bp = breakpoints(p, weak_coupling_roots(p), s.w_max);
  s.breakpoints.insert(s.breakpoints.end(), bp.begin(), bp.end());
  return s;
}

void weak_guard(const ModelParams& p) {
  if (p.g0 > 0.1) {
    std::ostringstream os;
    os << "weak-coupling expansion used at g0 = " << p.g0 << " > 0.1";
    warn(os.str());
  }
}

}  // namespace

double occupation_weak_coupling(double t, const ModelParams& p, const QuadratureSpec& spec) {
  if (t < 0) throw Error(ErrorCode::invalid_argument, "weak coupling: t must be >= 0");
  weak_guard(p);
  const double decay = std::exp(-2 * p.g0 * p.Omega * t);
  if (p.g0 == 0) return p.n0;
  const CharacteristicRoots wr = weak_coupling_roots(p);
  const cplx e4 = std::exp(wr.z1 * t), e5 = std::exp(wr.z2 * t);
  const cplx e6 = std::exp((wr.z1 + std::conj(wr.z2)) * t);
  const double e2 = std::exp(-2 * p.gamma * t);
  auto f = [&](double w) {
    const auto c = f_constants(w, p);
    const cplx ph = std::polar(1.0, -w * t);
    const double br = c[0].real() + c[1].real() * e2 + c[2].real() * decay +
                      2 * std::real(c[3] * e4 * ph) + 2 * std::real(c[4] * e5 * ph) +
                      2 * std::real(c[5] * e6);
    return QVec<1>(coupling_weight_real(w, p) * occupation_factor(w, p) * br);
  };
  auto res = integrate_semi_infinite<1>(f, weak_spec(t, p, spec));
  require_converged(res, "weak-coupling occupation");
  return p.n0 * decay + res.value[0];
}

double occupation_weak_coupling_asymptotic(const ModelParams& p, const QuadratureSpec& spec) {
  weak_guard(p);
  if (!(p.g0 > 0))
    throw Error(ErrorCode::domain, "asymptotic occupation requires g0 > 0");
  auto f = [&](double w) {
    return QVec<1>(coupling_weight_real(w, p) * occupation_factor(w, p) * f_constants(w, p)[0].real());
  };
  auto res = integrate_semi_infinite<1>(f, weak_spec(0.0, p, spec));
  require_converged(res, "weak-coupling asymptote");
  return res.value[0];
}

double occupation_weak_coupling_compact(double t, const ModelParams& p, const QuadratureSpec& spec) {
  if (p.g0 == 0) return p.n0;
  const double decay = std::exp(-2 * p.g0 * p.Omega * t);
  return p.n0 * decay + occupation_weak_coupling_asymptotic(p, spec) * (1 - decay);
}

double low_temperature_asymptote(const ModelParams& p) {
  if (p.T > 0.2 * p.Omega) {
    std::ostringstream os;
    os << "low-temperature expansion used at T/Omega = " << p.T / p.Omega << " > 0.2";
    warn(os.str());
  }
  const double x = p.T / p.Omega;
  const double pre = p.g0 / std::numbers::pi * x * x;
  if (p.statistics == BathStatistics::fermi)
    return pre * (0.5 * kZeta2 + 3 * x * kZeta3 + 63.0 / 4.0 * x * x * kZeta4);
  return pre * (kZeta2 + 4 * x * kZeta3 + 18 * x * x * kZeta4);
}

double statistics_ratio(double T, double Omega) {
  if (T < 0 || !(Omega > 0)) throw Error(ErrorCode::invalid_argument, "statistics_ratio: need T >= 0, Omega > 0");
  if (T == 0) return 1.0;
  return std::tanh(Omega / (2 * T));
}

double thermal_reference(const ModelParams& p) { return occupation_factor(p.Omega, p); }

double friction_asymptotic(const CharacteristicRoots& r) { return -0.5 * (r.z2 + std::conj(r.z2)).real(); }

FrictionValue friction(double t, const CharacteristicRoots& r, const ModelParams& p) {
  if (t < 0) throw Error(ErrorCode::invalid_argument, "friction: t must be >= 0");
  if (log_amplitude(t, r, p) < std::log(1e-300)) return {friction_asymptotic(r), true};
  const cplx shift(p.gamma, -p.g0 * p.gamma);
  const cplx d = r.z1 - r.z2;
  const cplx c1 = (r.z1 + shift) / d, c2 = -(r.z2 + shift) / d;
  const cplx e = std::exp(t * d);
  const cplx ratio = (r.z1 * c1 * e + r.z2 * c2) / (c1 * e + c2);
  return {-ratio.real(), false};
}

DiffusionValue diffusion(double t, Ordering o, const CharacteristicRoots& r, const ModelParams& p,
                         const QuadratureSpec& spec) {
  const FrictionValue lam = friction(t, r, p);
  if (p.g0 == 0) return {0.0, lam.asymptotic};
  if (lam.asymptotic) return {lam.value * asymptotic_moment(o, p, r, spec), true};
  const auto res = weighted_moments<1>(t, {vacancy_or_occupation(o)}, p, r, spec);
  return {lam.value * res.value[0] + 0.5 * res.value[1], false};
}

TransportPoint transport_point(double t, const ModelParams& p, const CharacteristicRoots& r,
                               const QuadratureSpec& spec) {
  TransportPoint out;
  out.time = t;
  const FrictionValue lam = friction(t, r, p);
  out.friction = lam.value;
  out.asymptotic = lam.asymptotic;
  if (p.g0 == 0) return out;
  if (lam.asymptotic) {
    auto res = asymptotic_moments<2>({Weight::occupied, Weight::vacant}, p, r, spec);
    out.diffusion_plus = lam.value * res.value[0];
    out.diffusion_minus = lam.value * res.value[1];
    return out;
  }
  const NoiseMoments m = noise_moments(t, p, r, spec);
  out.diffusion_plus = lam.value * m.plus + 0.5 * m.plus_rate;
  out.diffusion_minus = lam.value * m.minus + 0.5 * m.minus_rate;
  return out;
}

EquilibriumSummary equilibrium_summary(const ModelParams& p, const CharacteristicRoots& r,
                                       const QuadratureSpec& spec) {
  EquilibriumSummary s;
  auto res = asymptotic_moments<3>({Weight::occupied, Weight::vacant, Weight::unit}, p, r, spec);
  s.n_infinity = res.value[0];
  s.sum_rule = res.value[2];
  s.lambda_infinity = friction_asymptotic(r);
  s.D_plus_infinity = s.lambda_infinity * s.n_infinity;
  s.D_minus_infinity = s.lambda_infinity * res.value[1];
  const double sign = p.statistics == BathStatistics::fermi ? -1.0 : 1.0;
  s.D_minus_detailed_balance = s.lambda_infinity * (1 + sign * s.n_infinity);
  s.reference_thermal = thermal_reference(p);
  s.low_T_expansion = p.T <= 0.2 * p.Omega ? low_temperature_asymptote(p)
                                            : std::numeric_limits<double>::quiet_NaN();
  return s;
}

std::vector<double> default_time_grid(const ModelParams& p, double t_max) {
  if (!(t_max > 0)) throw Error(ErrorCode::invalid_argument, "time grid: t_max must be > 0");
  const double dt0 = 0.05 / p.gamma;
  double dt1 = t_max / 100;
  if (p.g0 > 0) dt1 = std::min(dt1, 0.1 / (p.g0 * p.Omega));
  dt1 = std::max(dt1, dt0);
  std::vector<double> times{0.0};
  double t = 0, dt = dt0;
  while (t + dt < t_max * (1 - 1e-12)) {
    t += dt;
    times.push_back(t);
    dt = std::min(dt * 1.15, dt1);
  }
  times.push_back(t_max);
  return times;
}

OccupationTrajectory occupation_trajectory(const std::vector<double>& times, const ModelParams& p,
                                           OccupationMethod method, const QuadratureSpec& spec,
                                           unsigned jobs) {
  if (method == OccupationMethod::oracle)
    throw Error(ErrorCode::invalid_argument, "oracle trajectories are produced by propagate_occupation");
  validate(p);
  OccupationTrajectory out;
  out.times = times;
  out.method = method;
  out.params = p;
  out.values.assign(times.size(), 0.0);
  if (method == OccupationMethod::exact_quadrature) {
    const CharacteristicRoots r = compute_roots(p);
    detail::parallel_for(times.size(), jobs, [&](std::size_t i) { out.values[i] = occupation(times[i], p, r, spec); });
  } else {
    detail::parallel_for(times.size(), jobs,
                         [&](std::size_t i) { out.values[i] = occupation_weak_coupling(times[i], p, spec); });
  }
  return out;
}

TransportTrajectory transport_trajectory(const std::vector<double>& times, const ModelParams& p,
                                         const QuadratureSpec& spec, unsigned jobs) {
  validate(p);
  const CharacteristicRoots r = compute_roots(p);
  TransportTrajectory out;
  out.times = times;
  const std::size_t n = times.size();
  out.friction.assign(n, 0.0);
  out.diffusion_plus.assign(n, 0.0);
  out.diffusion_minus.assign(n, 0.0);
  std::vector<char> flags(n, 0);
  detail::parallel_for(n, jobs, [&](std::size_t i) {
    const TransportPoint tp = transport_point(times[i], p, r, spec);
    out.friction[i] = tp.friction;
    out.diffusion_plus[i] = tp.diffusion_plus;
    out.diffusion_minus[i] = tp.diffusion_minus;
    flags[i] = tp.asymptotic;
  });
  out.asymptotic.assign(flags.begin(), flags.end());
  return out;
}

double bound_violation(const OccupationTrajectory& traj) {
  double worst = 0;
  for (double v : traj.values) {
    worst = std::max(worst, -v);
    if (traj.params.statistics == BathStatistics::fermi) worst = std::max(worst, v - 1);
  }
  return worst;
}

}  // namespace fermibath
