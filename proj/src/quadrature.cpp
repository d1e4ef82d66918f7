#include "fermibath/quadrature.hpp"

#include <algorithm>

namespace fermibath {

double default_w_max(double gamma, double Omega, double T, double mu) {
  return std::max({20 * gamma, Omega + 50 * T, 10 * Omega, mu + 50 * T});
}

void validate(const QuadratureSpec& spec) {
  auto fail = [](const char* msg) { throw Error(ErrorCode::invalid_argument, msg); };
  if (!(spec.rel_tol > 0)) fail("quadrature rel_tol must be > 0");
  if (!(spec.abs_tol > 0)) fail("quadrature abs_tol must be > 0");
  if (spec.max_panels < 4) fail("quadrature max_panels must be >= 4");
  if (!(spec.panel_scale > 0)) fail("quadrature panel_scale must be > 0");
  if (!(spec.oscillation_time >= 0) || !(spec.memory_time >= 0)) fail("quadrature time hints must be >= 0");
  if (!(spec.w_max >= 0)) fail("quadrature w_max must be >= 0");
  if (!(spec.tail_power > 1)) fail("quadrature tail_power must be > 1");
}

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         const QuadratureSpec& spec) {
  auto g = [&f](double w) { return QVec<1>(f(w)); };
  auto r = integrate_semi_infinite<1>(g, spec);
  return {r.value[0], r.error_estimate[0], r.panels_used, r.truncation_bound, r.w_max, r.converged};
}

ComplexQuadratureResult integrate_semi_infinite_complex(
    const std::function<std::complex<double>(double)>& f, const QuadratureSpec& spec) {
  auto g = [&f](double w) {
    const std::complex<double> v = f(w);
    return QVec<2>(v.real(), v.imag());
  };
  auto r = integrate_semi_infinite<2>(g, spec);
  return {{r.value[0], r.value[1]},
          {r.error_estimate[0], r.error_estimate[1]},
          r.panels_used,
          r.truncation_bound,
          r.w_max,
          r.converged};
}

}  // namespace fermibath
