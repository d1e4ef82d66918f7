#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "doctest.h"
#include "fermibath/diagnostics.hpp"
#include "fermibath/errors.hpp"
#include "fermibath/model.hpp"

using namespace fermibath;

namespace {

struct CapturedWarnings {
  std::vector<std::string> seen;
  CapturedWarnings() {
    reset_warnings();
    set_warning_handler([this](const std::string& m) { seen.push_back(m); });
  }
  ~CapturedWarnings() { set_warning_handler({}); }
};

}  // namespace

TEST_SUITE("model") {

TEST_CASE("bare frequency adds half the kernel weight") {
  ModelParams p;
  p.Omega = 1.0;
  p.g0 = 0.1;
  p.gamma = 12.0;
  CHECK(bare_frequency(p) == doctest::Approx(1.6).epsilon(1e-15));
  p.g0 = 0;
  CHECK(bare_frequency(p) == 1.0);
}

TEST_CASE("spectral density is a Lorentzian") {
  ModelParams p;
  CHECK(spectral_density(0.0, p) == doctest::Approx(p.g0 / M_PI).epsilon(1e-15));
  CHECK(spectral_density(p.gamma, p) == doctest::Approx(0.5 * p.g0 / M_PI).epsilon(1e-15));
  CHECK_THROWS_AS(spectral_density(-1.0, p), Error);
  // w J(w) agrees with the complex weight on the real axis
  for (double w : {0.1, 3.0, 40.0})
    CHECK(coupling_weight({w, 0.0}, p).real() == doctest::Approx(w * spectral_density(w, p)).epsilon(1e-14));
}

TEST_CASE("occupation factors") {
  ModelParams p;
  p.T = 0.5;
  p.mu = 0.3;
  CHECK(occupation_factor(0.3, p) == doctest::Approx(0.5));
  const double x = (2.0 - p.mu) / p.T;
  CHECK(occupation_factor(2.0, p) == doctest::Approx(1 / (std::exp(x) + 1)).epsilon(1e-14));
  CHECK(vacancy_factor(2.0, p) == doctest::Approx(1 - 1 / (std::exp(x) + 1)).epsilon(1e-14));
  CHECK(occupation_factor(1e4, p) >= 0.0);
  CHECK(occupation_factor(-1e4, p) == doctest::Approx(1.0));

  p.T = 0;
  CHECK(occupation_factor(0.2, p) == 1.0);
  CHECK(occupation_factor(0.4, p) == 0.0);

  p.statistics = BathStatistics::bose;
  p.mu = 0;
  p.T = 2.0;
  CHECK(occupation_factor(1.0, p) == doctest::Approx(1 / (std::exp(0.5) - 1)).epsilon(1e-14));
  CHECK(vacancy_factor(1.0, p) == doctest::Approx(1 + 1 / (std::exp(0.5) - 1)).epsilon(1e-14));
  CHECK_THROWS_AS(occupation_factor(0.0, p), Error);
  p.T = 0;
  CHECK(occupation_factor(1.0, p) == 0.0);
}

TEST_CASE("complex occupation continues the real one") {
  for (auto s : {BathStatistics::fermi, BathStatistics::bose}) {
    ModelParams p;
    p.statistics = s;
    p.T = 0.7;
    p.mu = s == BathStatistics::fermi ? 0.4 : -0.2;
    for (double w : {1.0, 5.0, 30.0}) {
      CHECK(std::abs(occupation_factor(std::complex<double>(w, 0), p) - occupation_factor(w, p)) <=
            1e-14 * (1 + occupation_factor(w, p)));
      CHECK(std::abs(vacancy_factor(std::complex<double>(w, 0), p) - vacancy_factor(w, p)) <= 1e-14);
    }
    // Fermi function has period 2 pi i T in w
    if (s == BathStatistics::fermi) {
      const std::complex<double> w(3.0, 0.1);
      const auto shifted = occupation_factor(w + std::complex<double>(0, 2 * M_PI * p.T), p);
      CHECK(std::abs(shifted - occupation_factor(w, p)) < 1e-12);
    }
  }
}

TEST_CASE("validation") {
  CapturedWarnings cap;
  ModelParams p;
  CHECK(validate(p).empty());
  CHECK(cap.seen.empty());

  auto bad = [](auto mutate) {
    ModelParams q;
    mutate(q);
    try {
      validate(q);
    } catch (const Error& e) {
      return e.code() == ErrorCode::invalid_argument;
    }
    return false;
  };
  CHECK(bad([](ModelParams& q) { q.Omega = 0; }));
  CHECK(bad([](ModelParams& q) { q.gamma = -1; }));
  CHECK(bad([](ModelParams& q) { q.g0 = -0.1; }));
  CHECK(bad([](ModelParams& q) { q.T = -1; }));
  CHECK(bad([](ModelParams& q) { q.n0 = 1.5; }));
  CHECK(bad([](ModelParams& q) { q.T = NAN; }));
  CHECK(bad([](ModelParams& q) {
    q.statistics = BathStatistics::bose;
    q.mu = 0.5;
  }));
  CHECK_FALSE(bad([](ModelParams& q) {
    q.statistics = BathStatistics::bose;
    q.n0 = 3;
  }));

  p.gamma = 2.0;
  const auto w = validate(p);
  REQUIRE(w.size() == 1);
  CHECK(w[0].find("gamma") != std::string::npos);
  CHECK(cap.seen.size() == 1);
  validate(p);
  CHECK(cap.seen.size() == 1);  // repeated warnings are reported once
}

TEST_CASE("statistics names") {
  CHECK(parse_statistics("Fermi") == BathStatistics::fermi);
  CHECK(parse_statistics("BOSE") == BathStatistics::bose);
  CHECK(std::string(to_string(BathStatistics::bose)) == "bose");
  CHECK_THROWS_AS(parse_statistics("boltzmann"), Error);
}

}
