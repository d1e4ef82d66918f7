#include <cmath>
#include <complex>

#include "doctest.h"
#include "fermibath/errors.hpp"
#include "fermibath/quadrature.hpp"

using namespace fermibath;

TEST_SUITE("quadrature") {

TEST_CASE("finite interval") {
  QuadratureSpec s;
  auto r = integrate_interval<1>([](double x) { return QVec<1>(std::sin(x)); }, 0.0, M_PI, s);
  CHECK(r.converged);
  CHECK(std::abs(r.value[0] - 2.0) < 1e-13);

  // two components in one pass
  auto r2 = integrate_interval<2>([](double x) { return QVec<2>(x * x, std::exp(x)); }, 0.0, 2.0, s);
  CHECK(std::abs(r2.value[0] - 8.0 / 3.0) < 1e-13);
  CHECK(std::abs(r2.value[1] - std::expm1(2.0)) < 1e-12);
}

TEST_CASE("integrable endpoint singularity is refined") {
  QuadratureSpec s;
  s.rel_tol = 1e-9;
  auto r = integrate_interval<1>([](double x) { return QVec<1>(1 / std::sqrt(x)); }, 0.0, 1.0, s);
  CHECK(r.converged);
  CHECK(std::abs(r.value[0] - 2.0) < 1e-8);
}

TEST_CASE("semi-infinite smooth integrands use the mapped tail") {
  QuadratureSpec s;
  s.w_max = 10;
  auto r = integrate_semi_infinite([](double w) { return std::exp(-w); }, s);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0) < 1e-12);

  auto lor = integrate_semi_infinite([](double w) { return 1 / (1 + w * w); }, s);
  CHECK(lor.converged);
  CHECK(std::abs(lor.value - M_PI / 2) < 1e-10);

  // breakpoints at a narrow peak
  s.breakpoints = {5.0};
  const double eps = 1e-3;
  auto peak = integrate_semi_infinite(
      [eps](double w) { return eps / ((w - 5) * (w - 5) + eps * eps); }, s);
  CHECK(peak.converged);
  CHECK(std::abs(peak.value - (M_PI / 2 + std::atan(5 / eps))) < 1e-8);
}

TEST_CASE("oscillatory tail along the complex ray") {
  for (double t : {0.5, 3.0, 20.0}) {
    QuadratureSpec s;
    s.oscillation_time = t;
    s.memory_time = 1.0;
    s.w_max = 20;
    SplitTail<1> tail;
    tail.smooth = [](double) { return QVec<1>::Zero(); };
    tail.oscillating = [](std::complex<double> w) {
      QCVec<1> v;
      v[0] = 1.0 / (1.0 + w * w);
      return v;
    };
    tail.frequency = t;
    auto f = [t](double w) { return QVec<1>(std::cos(w * t) / (1 + w * w)); };
    auto r = integrate_semi_infinite<1>(f, s, &tail);
    CHECK(r.converged);
    CHECK(std::abs(r.value[0] - M_PI / 2 * std::exp(-t)) < 1e-10);
  }
}

TEST_CASE("envelope tail bound extends the cutoff") {
  const double t = 2.0;
  QuadratureSpec s;
  s.oscillation_time = t;
  s.memory_time = 1.0;
  s.w_max = 8;
  s.tail_rule = TailRule::envelope;
  s.tail_power = 4;
  s.rel_tol = 1e-7;
  auto f = [t](double w) { return QVec<1>(std::cos(w * t) / ((1 + w * w) * (1 + w * w))); };
  auto r = integrate_semi_infinite<1>(f, s);
  CHECK(r.converged);
  CHECK(r.w_max > 8);
  CHECK(std::abs(r.value[0] - M_PI / 4 * (1 + t) * std::exp(-t)) < 1e-8);
}

TEST_CASE("complex wrapper") {
  QuadratureSpec s;
  s.w_max = 30;
  auto r = integrate_semi_infinite_complex(
      [](double w) { return std::exp(std::complex<double>(-1.0, 2.0) * w); }, s);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0 / std::complex<double>(1.0, -2.0)) < 1e-8);
}

TEST_CASE("failure reporting") {
  QuadratureSpec s;
  s.max_panels = 4;
  s.rel_tol = 1e-14;
  auto r = integrate_interval<1>([](double x) { return QVec<1>(std::sin(200 * x * x)); }, 0.0, 10.0, s);
  CHECK_FALSE(r.converged);
  try {
    require_converged(r, "test integral");
    FAIL("expected a quadrature failure");
  } catch (const QuadratureFailure& e) {
    CHECK(e.code() == ErrorCode::quadrature);
    CHECK(e.best_estimate() == r.value[0]);
    CHECK(std::string(e.what()).find("test integral") != std::string::npos);
  }

  QuadratureSpec bad;
  bad.rel_tol = 0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = QuadratureSpec{};
  bad.tail_power = 1;
  CHECK_THROWS_AS(validate(bad), Error);

  QuadratureSpec ok;
  auto nan = [](double w) { return QVec<1>(w > 1 ? NAN : 1.0); };
  CHECK_THROWS_AS(integrate_interval<1>(nan, 0.0, 2.0, ok), NonFiniteIntegrand);
}

TEST_CASE("threads do not change the result") {
  QuadratureSpec s;
  s.oscillation_time = 5;
  s.memory_time = 0.1;
  s.w_max = 200;
  s.tail_rule = TailRule::envelope;
  auto f = [](double w) { return QVec<1>(std::cos(5 * w) / (1 + w * w)); };
  auto a = integrate_semi_infinite<1>(f, s);
  s.threads = 4;
  auto b = integrate_semi_infinite<1>(f, s);
  CHECK(a.value[0] == b.value[0]);
  CHECK(a.panels_used == b.panels_used);
}

TEST_CASE("default cutoff policy") {
  CHECK(default_w_max(12, 1, 1, 0) == 240);
  CHECK(default_w_max(12, 1, 10, 0) == 501);
  CHECK(default_w_max(1, 5, 0, 0) == 50);
  CHECK(default_w_max(12, 1, 1, 400) == 450);
}

}
