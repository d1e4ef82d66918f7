/* fermibath C interface.
 *
 * Units: hbar = k_B = 1, energies in MeV, times in 1/MeV.
 * Every function returning fb_status leaves outputs untouched on failure;
 * fb_last_error() then describes the failure (per thread).
 * Handles are immutable after creation and may be shared between threads.
 */
#ifndef FERMIBATH_H
#define FERMIBATH_H

#include <stddef.h>

#if defined(FERMIBATH_BUILDING_LIBRARY)
#define FB_API __attribute__((visibility("default")))
#else
#define FB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fb_status {
  FB_OK = 0,
  FB_ERR_INVALID_ARGUMENT = 1,
  FB_ERR_DOMAIN = 2,
  FB_ERR_DEGENERATE_ROOTS = 3,
  FB_ERR_RESONANCE_POLE = 4,
  FB_ERR_QUADRATURE = 5,
  FB_ERR_NUMERICAL = 6,
  FB_ERR_NULL_POINTER = 7,
  FB_ERR_INTERNAL = 8
} fb_status;

typedef enum fb_statistics { FB_FERMI = 0, FB_BOSE = 1 } fb_statistics;

/* FB_PLUS_MINUS: <F+ F> (weight n); FB_MINUS_PLUS: <F F+> (weight 1 -+ n) */
typedef enum fb_ordering { FB_PLUS_MINUS = 0, FB_MINUS_PLUS = 1 } fb_ordering;

typedef enum fb_initial_correlation {
  FB_INITIAL_PRODUCT = 0,
  FB_INITIAL_DRESSED = 1
} fb_initial_correlation;

typedef struct fb_params {
  double omega;       /* renormalized frequency */
  double g0;          /* coupling */
  double gamma;       /* Drude cutoff */
  double temperature;
  double mu;          /* bath chemical potential */
  fb_statistics statistics;
  double n0;          /* initial occupation */
} fb_params;

typedef struct fb_quadrature {
  double rel_tol;
  double abs_tol;
  size_t max_panels;
  double panel_scale;
  double w_max;       /* 0 selects the built-in cutoff policy */
  unsigned threads;
} fb_quadrature;

typedef struct fb_transport {
  double time;
  double friction;
  double diffusion_plus;
  double diffusion_minus;
  int asymptotic;     /* nonzero: |A|^2 underflowed, asymptotic values reported */
} fb_transport;

typedef struct fb_equilibrium {
  double n_infinity;
  double lambda_infinity;
  double d_plus_infinity;
  double d_minus_infinity;
  double d_minus_detailed_balance; /* lambda (1 -+ n) */
  double reference_thermal;
  double low_t_expansion;  /* NaN above T = 0.2 omega */
  double sum_rule;
} fb_equilibrium;

typedef struct fb_model fb_model;
typedef struct fb_oracle fb_oracle;

typedef void (*fb_warning_callback)(const char* message, void* user);

FB_API const char* fb_version(void);
FB_API const char* fb_status_string(fb_status status);
FB_API const char* fb_last_error(void);

/* NULL silences warnings; the default sink writes to stderr. */
FB_API void fb_set_warning_callback(fb_warning_callback callback, void* user);

FB_API void fb_default_params(fb_params* out);
FB_API void fb_default_quadrature(fb_quadrature* out);

/* Stateless helpers */
FB_API fb_status fb_bare_frequency(const fb_params* params, double* out);
FB_API fb_status fb_spectral_density(const fb_params* params, double w, double* out);
FB_API fb_status fb_occupation_factor(const fb_params* params, double w, double* out);
FB_API fb_status fb_memory_kernel(const fb_params* params, double t, double* kernel, double* integral);
FB_API fb_status fb_low_temperature_asymptote(const fb_params* params, double* out);
FB_API fb_status fb_statistics_ratio(double temperature, double omega, double* out);
/* Writes up to capacity times; *count receives the full grid length. */
FB_API fb_status fb_default_time_grid(const fb_params* params, double t_max, double* out,
                                      size_t capacity, size_t* count);

/* Model: validated parameters, characteristic roots, quadrature settings.
 * quadrature may be NULL for defaults. */
FB_API fb_status fb_model_create(const fb_params* params, const fb_quadrature* quadrature,
                                 fb_model** out);
FB_API void fb_model_destroy(fb_model* model);
FB_API fb_status fb_model_params(const fb_model* model, fb_params* out);
FB_API size_t fb_model_warning_count(const fb_model* model);
FB_API const char* fb_model_warning(const fb_model* model, size_t index);

FB_API fb_status fb_roots(const fb_model* model, double z1[2], double z2[2]);
FB_API fb_status fb_amplitude(const fb_model* model, double t, double out[2]);
FB_API fb_status fb_noise_moment(const fb_model* model, double t, fb_ordering ordering,
                                 double* value, double* rate);
FB_API fb_status fb_occupation(const fb_model* model, double t, double* out);
FB_API fb_status fb_occupation_weak_coupling(const fb_model* model, double t, double* out);
FB_API fb_status fb_occupation_asymptotic(const fb_model* model, double* out);
/* n values for n times; weak_coupling selects the expansion; jobs > 1 runs in parallel. */
FB_API fb_status fb_occupation_trajectory(const fb_model* model, const double* times, size_t n,
                                          int weak_coupling, unsigned jobs, double* out);
FB_API fb_status fb_friction(const fb_model* model, double t, double* out, int* asymptotic);
FB_API fb_status fb_diffusion(const fb_model* model, double t, fb_ordering ordering, double* out,
                              int* asymptotic);
FB_API fb_status fb_transport_point(const fb_model* model, double t, fb_transport* out);
FB_API fb_status fb_equilibrium_summary(const fb_model* model, fb_equilibrium* out);

/* Discrete-bath oracle; w_max <= 0 selects 20 gamma. */
FB_API fb_status fb_oracle_create(const fb_params* params, size_t modes, double w_max,
                                  fb_oracle** out);
FB_API void fb_oracle_destroy(fb_oracle* oracle);
FB_API fb_status fb_oracle_recurrence_time(const fb_oracle* oracle, double* out);
FB_API fb_status fb_oracle_coupling_sum(const fb_oracle* oracle, double* out);
FB_API fb_status fb_oracle_kernel(const fb_oracle* oracle, double t, double* out);
/* occupations: statistics, temperature, mu and n0 used for the initial state;
 * omega, g0 and gamma must equal those the oracle was created with. */
FB_API fb_status fb_oracle_propagate(const fb_oracle* oracle, const fb_params* occupations,
                                     fb_initial_correlation correlation, const double* times,
                                     size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* FERMIBATH_H */
