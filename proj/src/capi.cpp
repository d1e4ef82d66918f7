#include "fermibath/fermibath.h"

#include <cmath>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "fermibath/diagnostics.hpp"
#include "fermibath/errors.hpp"
#include "fermibath/model.hpp"
#include "fermibath/observables.hpp"
#include "fermibath/oracle.hpp"
#include "fermibath/response.hpp"

struct fb_model {
  fermibath::ModelParams params;
  fermibath::QuadratureSpec spec;
  fermibath::CharacteristicRoots roots;
  std::vector<std::string> warnings;
};

struct fb_oracle {
  std::unique_ptr<fermibath::BathOracle> oracle;
};

namespace {

using namespace fermibath;

thread_local std::string t_last_error;

fb_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return FB_ERR_INVALID_ARGUMENT;
    case ErrorCode::domain: return FB_ERR_DOMAIN;
    case ErrorCode::degenerate_roots: return FB_ERR_DEGENERATE_ROOTS;
    case ErrorCode::resonance_pole: return FB_ERR_RESONANCE_POLE;
    case ErrorCode::quadrature: return FB_ERR_QUADRATURE;
    default: return FB_ERR_NUMERICAL;
  }
}

template <class F>
fb_status guarded(F&& f) {
  try {
    f();
    t_last_error.clear();
    return FB_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return FB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return FB_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown failure";
    return FB_ERR_INTERNAL;
  }
}

void need(const void* p) {
  if (!p) throw Error(ErrorCode::invalid_argument, "null pointer argument");
}

ModelParams to_params(const fb_params* p) {
  need(p);
  ModelParams m;
  m.Omega = p->omega;
  m.g0 = p->g0;
  m.gamma = p->gamma;
  m.T = p->temperature;
  m.mu = p->mu;
  if (p->statistics != FB_FERMI && p->statistics != FB_BOSE)
    throw Error(ErrorCode::invalid_argument, "unknown statistics value");
  m.statistics = p->statistics == FB_FERMI ? BathStatistics::fermi : BathStatistics::bose;
  m.n0 = p->n0;
  return m;
}

fb_params from_params(const ModelParams& m) {
  return {m.Omega, m.g0, m.gamma, m.T, m.mu,
          m.statistics == BathStatistics::fermi ? FB_FERMI : FB_BOSE, m.n0};
}

Ordering to_ordering(fb_ordering o) {
  if (o == FB_PLUS_MINUS) return Ordering::plus_minus;
  if (o == FB_MINUS_PLUS) return Ordering::minus_plus;
  throw Error(ErrorCode::invalid_argument, "unknown ordering value");
}

fb_status null_status() {
  t_last_error = "null pointer argument";
  return FB_ERR_NULL_POINTER;
}

struct CallbackSink {
  fb_warning_callback cb;
  void* user;
};

}  // namespace

extern "C" {

const char* fb_version(void) { return FERMIBATH_VERSION; }

const char* fb_status_string(fb_status status) {
  switch (status) {
    case FB_OK: return "ok";
    case FB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FB_ERR_DOMAIN: return "domain error";
    case FB_ERR_DEGENERATE_ROOTS: return "degenerate characteristic roots";
    case FB_ERR_RESONANCE_POLE: return "resonance pole";
    case FB_ERR_QUADRATURE: return "quadrature did not converge";
    case FB_ERR_NUMERICAL: return "numerical failure";
    case FB_ERR_NULL_POINTER: return "null pointer";
    default: return "internal error";
  }
}

const char* fb_last_error(void) { return t_last_error.c_str(); }

void fb_set_warning_callback(fb_warning_callback callback, void* user) {
  if (!callback) {
    set_warning_handler({});
    return;
  }
  CallbackSink sink{callback, user};
  set_warning_handler([sink](const std::string& msg) { sink.cb(msg.c_str(), sink.user); });
}

void fb_default_params(fb_params* out) {
  if (out) *out = from_params(ModelParams{});
}

void fb_default_quadrature(fb_quadrature* out) {
  if (!out) return;
  const QuadratureSpec s;
  *out = {s.rel_tol, s.abs_tol, s.max_panels, s.panel_scale, s.w_max, s.threads};
}

fb_status fb_bare_frequency(const fb_params* params, double* out) {
  if (!params || !out) return null_status();
  return guarded([&] {
    const ModelParams p = to_params(params);
    validate(p);
    *out = bare_frequency(p);
  });
}

fb_status fb_spectral_density(const fb_params* params, double w, double* out) {
  if (!params || !out) return null_status();
  return guarded([&] { *out = spectral_density(w, to_params(params)); });
}

fb_status fb_occupation_factor(const fb_params* params, double w, double* out) {
  if (!params || !out) return null_status();
  return guarded([&] { *out = occupation_factor(w, to_params(params)); });
}

fb_status fb_memory_kernel(const fb_params* params, double t, double* kernel, double* integral) {
  if (!params) return null_status();
  return guarded([&] {
    if (t < 0) throw Error(ErrorCode::invalid_argument, "memory kernel: t must be >= 0");
    const ModelParams p = to_params(params);
    if (kernel) *kernel = memory_kernel(t, p);
    if (integral) *integral = memory_kernel_integral(t, p);
  });
}

fb_status fb_low_temperature_asymptote(const fb_params* params, double* out) {
  if (!params || !out) return null_status();
  return guarded([&] { *out = low_temperature_asymptote(to_params(params)); });
}

fb_status fb_statistics_ratio(double temperature, double omega, double* out) {
  if (!out) return null_status();
  return guarded([&] { *out = statistics_ratio(temperature, omega); });
}

fb_status fb_default_time_grid(const fb_params* params, double t_max, double* out, size_t capacity,
                               size_t* count) {
  if (!params || !count || (capacity > 0 && !out)) return null_status();
  return guarded([&] {
    const auto grid = default_time_grid(to_params(params), t_max);
    for (size_t i = 0; i < grid.size() && i < capacity; ++i) out[i] = grid[i];
    *count = grid.size();
  });
}

fb_status fb_model_create(const fb_params* params, const fb_quadrature* quadrature, fb_model** out) {
  if (!params || !out) return null_status();
  return guarded([&] {
    auto m = std::make_unique<fb_model>();
    m->params = to_params(params);
    m->warnings = validate(m->params);
    if (quadrature) {
      m->spec.rel_tol = quadrature->rel_tol;
      m->spec.abs_tol = quadrature->abs_tol;
      m->spec.max_panels = quadrature->max_panels;
      m->spec.panel_scale = quadrature->panel_scale;
      m->spec.w_max = quadrature->w_max;
      m->spec.threads = quadrature->threads;
    }
    validate(m->spec);
    m->roots = compute_roots(m->params);
    *out = m.release();
  });
}

void fb_model_destroy(fb_model* model) { delete model; }

fb_status fb_model_params(const fb_model* model, fb_params* out) {
  if (!model || !out) return null_status();
  *out = from_params(model->params);
  return FB_OK;
}

size_t fb_model_warning_count(const fb_model* model) { return model ? model->warnings.size() : 0; }

const char* fb_model_warning(const fb_model* model, size_t index) {
  if (!model || index >= model->warnings.size()) return nullptr;
  return model->warnings[index].c_str();
}

fb_status fb_roots(const fb_model* model, double z1[2], double z2[2]) {
  if (!model || !z1 || !z2) return null_status();
  z1[0] = model->roots.z1.real();
  z1[1] = model->roots.z1.imag();
  z2[0] = model->roots.z2.real();
  z2[1] = model->roots.z2.imag();
  return FB_OK;
}

fb_status fb_amplitude(const fb_model* model, double t, double out[2]) {
  if (!model || !out) return null_status();
  return guarded([&] {
    const cplx a = amplitude(t, model->roots, model->params);
    out[0] = a.real();
    out[1] = a.imag();
  });
}

fb_status fb_noise_moment(const fb_model* model, double t, fb_ordering ordering, double* value,
                          double* rate) {
  if (!model) return null_status();
  return guarded([&] {
    const Ordering o = to_ordering(ordering);
    const NoiseMoments m = noise_moments(t, model->params, model->roots, model->spec);
    if (value) *value = m.moment(o);
    if (rate) *rate = m.rate(o);
  });
}

fb_status fb_occupation(const fb_model* model, double t, double* out) {
  if (!model || !out) return null_status();
  return guarded([&] { *out = occupation(t, model->params, model->roots, model->spec); });
}

fb_status fb_occupation_weak_coupling(const fb_model* model, double t, double* out) {
  if (!model || !out) return null_status();
  return guarded([&] { *out = occupation_weak_coupling(t, model->params, model->spec); });
}

fb_status fb_occupation_asymptotic(const fb_model* model, double* out) {
  if (!model || !out) return null_status();
  return guarded([&] { *out = occupation_asymptotic(model->params, model->roots, model->spec); });
}

fb_status fb_occupation_trajectory(const fb_model* model, const double* times, size_t n,
                                   int weak_coupling, unsigned jobs, double* out) {
  if (!model || (n > 0 && (!times || !out))) return null_status();
  return guarded([&] {
    const std::vector<double> grid(times, times + n);
    const auto traj = occupation_trajectory(
        grid, model->params,
        weak_coupling ? OccupationMethod::weak_coupling : OccupationMethod::exact_quadrature,
        model->spec, jobs);
    for (size_t i = 0; i < n; ++i) out[i] = traj.values[i];
  });
}

fb_status fb_friction(const fb_model* model, double t, double* out, int* asymptotic) {
  if (!model || !out) return null_status();
  return guarded([&] {
    const FrictionValue f = friction(t, model->roots, model->params);
    *out = f.value;
    if (asymptotic) *asymptotic = f.asymptotic;
  });
}

fb_status fb_diffusion(const fb_model* model, double t, fb_ordering ordering, double* out,
                       int* asymptotic) {
  if (!model || !out) return null_status();
  return guarded([&] {
    const DiffusionValue d = diffusion(t, to_ordering(ordering), model->roots, model->params, model->spec);
    *out = d.value;
    if (asymptotic) *asymptotic = d.asymptotic;
  });
}

fb_status fb_transport_point(const fb_model* model, double t, fb_transport* out) {
  if (!model || !out) return null_status();
  return guarded([&] {
    const TransportPoint tp = transport_point(t, model->params, model->roots, model->spec);
    *out = {tp.time, tp.friction, tp.diffusion_plus, tp.diffusion_minus, tp.asymptotic ? 1 : 0};
  });
}

fb_status fb_equilibrium_summary(const fb_model* model, fb_equilibrium* out) {
  if (!model || !out) return null_status();
  return guarded([&] {
    const EquilibriumSummary s = equilibrium_summary(model->params, model->roots, model->spec);
    *out = {s.n_infinity,        s.lambda_infinity, s.D_plus_infinity, s.D_minus_infinity,
            s.D_minus_detailed_balance, s.reference_thermal, s.low_T_expansion, s.sum_rule};
  });
}

fb_status fb_oracle_create(const fb_params* params, size_t modes, double w_max, fb_oracle** out) {
  if (!params || !out) return null_status();
  return guarded([&] {
    const ModelParams p = to_params(params);
    auto o = std::make_unique<fb_oracle>();
    o->oracle = std::make_unique<BathOracle>(p, modes, w_max > 0 ? w_max : 20 * p.gamma);
    *out = o.release();
  });
}

void fb_oracle_destroy(fb_oracle* oracle) { delete oracle; }

fb_status fb_oracle_recurrence_time(const fb_oracle* oracle, double* out) {
  if (!oracle || !out) return null_status();
  *out = oracle->oracle->bath().t_rec;
  return FB_OK;
}

fb_status fb_oracle_coupling_sum(const fb_oracle* oracle, double* out) {
  if (!oracle || !out) return null_status();
  *out = coupling_sum(oracle->oracle->bath());
  return FB_OK;
}

fb_status fb_oracle_kernel(const fb_oracle* oracle, double t, double* out) {
  if (!oracle || !out) return null_status();
  *out = reconstructed_kernel(oracle->oracle->bath(), t);
  return FB_OK;
}

fb_status fb_oracle_propagate(const fb_oracle* oracle, const fb_params* occupations,
                              fb_initial_correlation correlation, const double* times, size_t n,
                              double* out) {
  if (!oracle || !occupations || (n > 0 && (!times || !out))) return null_status();
  return guarded([&] {
    if (correlation != FB_INITIAL_PRODUCT && correlation != FB_INITIAL_DRESSED)
      throw Error(ErrorCode::invalid_argument, "unknown initial correlation");
    const std::vector<double> grid(times, times + n);
    const auto traj = oracle->oracle->propagate(
        to_params(occupations), grid,
        correlation == FB_INITIAL_PRODUCT ? InitialCorrelation::product : InitialCorrelation::dressed);
    for (size_t i = 0; i < n; ++i) out[i] = traj.values[i];
  });
}

}  // extern "C"
