#include <array>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "fermibath/errors.hpp"
#include "fermibath/response.hpp"

using namespace fermibath;

namespace {

constexpr cplx I(0.0, 1.0);

ModelParams params(double g0, double gamma = 12.0, double Omega = 1.0) {
  ModelParams p;
  p.g0 = g0;
  p.gamma = gamma;
  p.Omega = Omega;
  return p;
}

// Memory-kernel equation as a local ODE in (a, u), u the retarded force:
//   a' = i Omega a + i s(t) + i u,  u' = g0 gamma a' - gamma u
// a(0) = 1, s = 0 gives A*(t); a(0) = 0, s = e^{iwt} gives -i B*_w(t).
std::array<cplx, 2> integrate_memory_ode(const ModelParams& p, double w, cplx a0, double source,
                                         double t_end, int steps) {
  auto rhs = [&](double t, const std::array<cplx, 2>& y) {
    const cplx da = I * p.Omega * y[0] + source * I * std::polar(1.0, w * t) + I * y[1];
    return std::array<cplx, 2>{da, p.g0 * p.gamma * da - p.gamma * y[1]};
  };
  auto axpy = [](const std::array<cplx, 2>& y, double h, const std::array<cplx, 2>& k) {
    return std::array<cplx, 2>{y[0] + h * k[0], y[1] + h * k[1]};
  };
  std::array<cplx, 2> y{a0, 0.0};
  const double h = t_end / steps;
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const auto k1 = rhs(t, y);
    const auto k2 = rhs(t + h / 2, axpy(y, h / 2, k1));
    const auto k3 = rhs(t + h / 2, axpy(y, h / 2, k2));
    const auto k4 = rhs(t + h, axpy(y, h, k3));
    for (int i = 0; i < 2; ++i) y[i] += h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

}  // namespace

TEST_SUITE("response") {

TEST_CASE("roots solve the characteristic equation") {
  for (double g0 : {0.0, 1e-4, 0.001, 0.1, 0.5, 2.0})
    for (double gamma : {3.0, 12.0, 50.0}) {
      const ModelParams p = params(g0, gamma);
      const auto r = compute_roots(p);
      CHECK(std::abs(characteristic_polynomial(r.z1, p)) < 1e-10 * gamma * gamma);
      CHECK(std::abs(characteristic_polynomial(r.z2, p)) < 1e-10 * gamma * gamma);
      // Vieta
      CHECK(std::abs(r.z1 * r.z2 - cplx(0, -p.Omega * gamma)) < 1e-10 * gamma * gamma);
      CHECK(std::abs(r.z1 + r.z2 - cplx(-gamma, p.Omega + g0 * gamma)) < 1e-10 * gamma);
    }
}

TEST_CASE("root labels follow the decoupled limit") {
  const auto r0 = compute_roots(params(0.0));
  CHECK(std::abs(r0.z1 - cplx(-12, 0)) < 1e-13);
  CHECK(std::abs(r0.z2 - cplx(0, 1)) < 1e-13);
  // z2 stays the slow root while z1 carries the memory decay
  for (double g0 : {0.001, 0.01, 0.1}) {
    const auto r = compute_roots(params(g0));
    CHECK(r.z2.real() < 0);
    CHECK(-r.z2.real() < -r.z1.real());
    CHECK(std::abs(r.z2.imag() - 1.0) < 5 * g0);
  }
  // first order: z2 = i Omega - g0 Omega gamma^2/(gamma^2 + Omega^2) + O(g0^2)
  const double g0 = 1e-5;
  const auto r = compute_roots(params(g0));
  CHECK(std::abs(r.z2.real() + g0 * 144.0 / 145.0) < 1e-8);
}

TEST_CASE("degenerate roots are reported") {
  // double root where gamma = Omega + g0 gamma and g0 gamma = Omega
  const ModelParams p = params(0.5, 2.0, 1.0);
  try {
    compute_roots(p);
    FAIL("expected degenerate roots");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_roots);
  }
  CHECK_NOTHROW(compute_roots(params(0.5, 2.2, 1.0)));
}

TEST_CASE("amplitude and response initial values") {
  for (double g0 : {0.001, 0.1, 0.5}) {
    const ModelParams p = params(g0);
    const auto r = compute_roots(p);
    CHECK(std::abs(amplitude(0.0, r, p) - 1.0) < 1e-12);
    for (double w : {0.0, 0.3, 1.0 + 1e-3, 7.0, 300.0})
      CHECK(std::abs(bath_response(w, 0.0, r, p)) < 1e-12);
    // the retarded force starts at zero
    CHECK(std::abs(amplitude_derivative(0.0, r, p) - cplx(0, p.Omega)) < 1e-12);
  }
}

TEST_CASE("amplitude solves the memory equation") {
  const ModelParams p = params(0.1);
  const auto r = compute_roots(p);
  for (double t : {0.2, 1.0, 5.0}) {
    const auto y = integrate_memory_ode(p, 0.0, 1.0, 0.0, t, 40000);
    CHECK(std::abs(amplitude(t, r, p) - y[0]) < 1e-9);
  }
}

TEST_CASE("bath response solves the driven memory equation") {
  for (double g0 : {0.01, 0.1}) {
    const ModelParams p = params(g0);
    const auto r = compute_roots(p);
    for (double w : {0.2, 1.0, 2.3, 15.0})
      for (double t : {0.5, 3.0}) {
        const auto y = integrate_memory_ode(p, w, 0.0, 1.0, t, 60000);
        const cplx expected = I * y[0];
        CHECK(std::abs(bath_response(w, t, r, p) - expected) < 1e-8 * (1 + std::abs(expected)));
      }
  }
}

TEST_CASE("partial fractions reproduce the bath response") {
  const ModelParams p = params(0.1);
  const auto r = compute_roots(p);
  const ResponseFractions fr(r, p);
  for (double w : {0.05, 1.0, 4.0, 100.0})
    for (double t : {0.0, 0.7, 12.0}) {
      const cplx b = fr.steady(w) * std::polar(1.0, w * t) + fr.c1(w) * std::exp(r.z1 * t) +
                     fr.c2(w) * std::exp(r.z2 * t);
      CHECK(std::abs(b + bath_response(w, t, r, p)) < 1e-13 * (1 + std::abs(b)));
    }
}

TEST_CASE("closed-form time derivatives match central differences") {
  const ModelParams p = params(0.1);
  const auto r = compute_roots(p);
  for (double t : {0.05, 0.5, 2.0, 9.0}) {
    const double h = 1e-5 * std::max(1.0, t);
    const cplx fd = (amplitude(t + h, r, p) - amplitude(t - h, r, p)) / (2 * h);
    CHECK(std::abs(fd - amplitude_derivative(t, r, p)) < 1e-7 * std::abs(amplitude_derivative(t, r, p)));
    for (double w : {0.3, 3.0}) {
      const cplx fdb = (bath_response(w, t + h, r, p) - bath_response(w, t - h, r, p)) / (2 * h);
      const cplx db = bath_response_derivative(w, t, r, p);
      CHECK(std::abs(fdb - db) < 1e-7 * std::abs(db));
    }
  }
}

TEST_CASE("resonance pole at zero coupling") {
  const ModelParams p = params(0.0);
  const auto r = compute_roots(p);
  try {
    bath_response(p.Omega, 1.0, r, p);
    FAIL("expected a resonance error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resonance_pole);
  }
  CHECK(std::isfinite(std::abs(bath_response(p.Omega * (1 + 1e-9), 1.0, r, p))));
}

TEST_CASE("memory kernel") {
  const ModelParams p = params(0.1);
  CHECK(memory_kernel(0.0, p) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(memory_kernel(1 / p.gamma, p) == doctest::Approx(1.2 / M_E).epsilon(1e-14));
  CHECK(memory_kernel_integral(0.0, p) == 0.0);
  CHECK(std::abs(memory_kernel_integral(100.0, p) - p.g0) < 1e-15);
  // small t: g0 gamma t without cancellation
  CHECK(memory_kernel_integral(1e-12, p) == doctest::Approx(p.g0 * p.gamma * 1e-12).epsilon(1e-10));
}

}
