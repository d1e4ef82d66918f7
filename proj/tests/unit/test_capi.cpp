#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "fermibath/fermibath.h"

namespace {

struct Model {
  fb_model* m = nullptr;
  explicit Model(const fb_params& p, const fb_quadrature* q = nullptr) {
    REQUIRE(fb_model_create(&p, q, &m) == FB_OK);
  }
  ~Model() { fb_model_destroy(m); }
};

fb_params defaults() {
  fb_params p;
  fb_default_params(&p);
  return p;
}

void collect(const char* msg, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(msg); }

}  // namespace

TEST_CASE("defaults and stateless helpers") {
  const fb_params p = defaults();
  CHECK(p.omega == 1.0);
  CHECK(p.gamma == 12.0);
  CHECK(p.g0 == doctest::Approx(0.1));
  CHECK(p.statistics == FB_FERMI);
  fb_quadrature q;
  fb_default_quadrature(&q);
  CHECK(q.rel_tol == 1e-8);
  CHECK(q.w_max == 0.0);

  double w = 0;
  CHECK(fb_bare_frequency(&p, &w) == FB_OK);
  CHECK(w == doctest::Approx(1.6));
  double k = 0, ki = 0;
  CHECK(fb_memory_kernel(&p, 0.0, &k, &ki) == FB_OK);
  CHECK(k == doctest::Approx(1.2));
  CHECK(ki == 0.0);
  CHECK(fb_memory_kernel(&p, -1.0, &k, &ki) == FB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(fb_last_error()).find("t must be") != std::string::npos);

  double j = 0;
  CHECK(fb_spectral_density(&p, -1.0, &j) == FB_ERR_DOMAIN);
  double r = 0;
  CHECK(fb_statistics_ratio(1.0, 1.0, &r) == FB_OK);
  CHECK(r == doctest::Approx(std::tanh(0.5)));

  size_t count = 0;
  CHECK(fb_default_time_grid(&p, 10.0, nullptr, 0, &count) == FB_OK);
  std::vector<double> grid(count);
  size_t again = 0;
  CHECK(fb_default_time_grid(&p, 10.0, grid.data(), grid.size(), &again) == FB_OK);
  CHECK(again == count);
  CHECK(grid.back() == 10.0);

  CHECK(std::string(fb_status_string(FB_ERR_RESONANCE_POLE)) == "resonance pole");
  CHECK(std::strlen(fb_version()) > 0);
}

TEST_CASE("model lifecycle and errors") {
  fb_params p = defaults();
  fb_model* m = nullptr;
  p.omega = -1;
  CHECK(fb_model_create(&p, nullptr, &m) == FB_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::string(fb_last_error()).find("Omega") != std::string::npos);

  p = defaults();
  p.statistics = static_cast<fb_statistics>(7);
  CHECK(fb_model_create(&p, nullptr, &m) == FB_ERR_INVALID_ARGUMENT);

  p = defaults();
  p.g0 = 0.5;
  p.gamma = 2.0;
  CHECK(fb_model_create(&p, nullptr, &m) == FB_ERR_DEGENERATE_ROOTS);

  CHECK(fb_model_create(nullptr, nullptr, &m) == FB_ERR_NULL_POINTER);
  fb_model_destroy(nullptr);

  fb_quadrature q;
  fb_default_quadrature(&q);
  q.rel_tol = -1;
  p = defaults();
  CHECK(fb_model_create(&p, &q, &m) == FB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("soft warnings are attached to the model") {
  std::vector<std::string> seen;
  fb_set_warning_callback(collect, &seen);
  fb_params p = defaults();
  p.gamma = 3.0;
  p.g0 = 0.01;
  {
    Model m(p);
    REQUIRE(fb_model_warning_count(m.m) == 1);
    CHECK(std::string(fb_model_warning(m.m, 0)).find("gamma") != std::string::npos);
    CHECK(fb_model_warning(m.m, 1) == nullptr);
  }
  fb_set_warning_callback(nullptr, nullptr);
  CHECK(seen.size() <= 1);
}

TEST_CASE("model queries") {
  fb_params p = defaults();
  p.n0 = 1.0;
  Model m(p);
  fb_params back;
  CHECK(fb_model_params(m.m, &back) == FB_OK);
  CHECK(back.n0 == 1.0);

  double z1[2], z2[2];
  CHECK(fb_roots(m.m, z1, z2) == FB_OK);
  CHECK(z1[0] < z2[0]);

  double a[2];
  CHECK(fb_amplitude(m.m, 0.0, a) == FB_OK);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(std::abs(a[1]) < 1e-14);

  double n = 0;
  CHECK(fb_occupation(m.m, 0.0, &n) == FB_OK);
  CHECK(n == doctest::Approx(1.0));

  double plus = 0, rate = 0, minus = 0;
  CHECK(fb_noise_moment(m.m, 2.0, FB_PLUS_MINUS, &plus, &rate) == FB_OK);
  CHECK(fb_noise_moment(m.m, 2.0, FB_MINUS_PLUS, &minus, nullptr) == FB_OK);
  CHECK(plus > 0);
  CHECK(minus > plus);
  CHECK(fb_noise_moment(m.m, 2.0, static_cast<fb_ordering>(5), &plus, nullptr) == FB_ERR_INVALID_ARGUMENT);
  CHECK(fb_noise_moment(m.m, -2.0, FB_PLUS_MINUS, &plus, nullptr) == FB_ERR_INVALID_ARGUMENT);

  fb_equilibrium eq;
  CHECK(fb_equilibrium_summary(m.m, &eq) == FB_OK);
  double ninf = 0;
  CHECK(fb_occupation_asymptotic(m.m, &ninf) == FB_OK);
  CHECK(eq.n_infinity == ninf);
  CHECK(eq.lambda_infinity == doctest::Approx(-z2[0]));
  CHECK(eq.d_plus_infinity == doctest::Approx(eq.lambda_infinity * eq.n_infinity));
  CHECK(eq.d_minus_detailed_balance == doctest::Approx(eq.lambda_infinity * (1 - eq.n_infinity)));
  CHECK(std::isnan(eq.low_t_expansion));

  double lam = 0;
  int flag = -1;
  CHECK(fb_friction(m.m, 1e5, &lam, &flag) == FB_OK);
  CHECK(flag == 1);
  CHECK(lam == eq.lambda_infinity);
  fb_transport tp;
  CHECK(fb_transport_point(m.m, 3.0, &tp) == FB_OK);
  double dp = 0;
  CHECK(fb_diffusion(m.m, 3.0, FB_PLUS_MINUS, &dp, &flag) == FB_OK);
  CHECK(flag == 0);
  CHECK(dp == doctest::Approx(tp.diffusion_plus).epsilon(1e-9));

  const double times[] = {0.0, 1.0, 5.0, 20.0};
  double serial[4], parallel[4], weak[4];
  CHECK(fb_occupation_trajectory(m.m, times, 4, 0, 1, serial) == FB_OK);
  CHECK(fb_occupation_trajectory(m.m, times, 4, 0, 4, parallel) == FB_OK);
  CHECK(fb_occupation_trajectory(m.m, times, 4, 1, 2, weak) == FB_OK);
  for (int i = 0; i < 4; ++i) CHECK(serial[i] == parallel[i]);
  CHECK(weak[0] == doctest::Approx(1.0));
}

TEST_CASE("outputs are untouched on failure") {
  fb_params p = defaults();
  p.g0 = 0;
  Model m(p);
  double n = 123;
  CHECK(fb_occupation_asymptotic(m.m, &n) == FB_ERR_DOMAIN);
  CHECK(n == 123);
}

TEST_CASE("error state is per thread") {
  fb_params p = defaults();
  p.omega = -1;
  fb_model* m = nullptr;
  CHECK(fb_model_create(&p, nullptr, &m) != FB_OK);
  std::string other;
  std::thread([&] { other = fb_last_error(); }).join();
  CHECK(other.empty());
  CHECK(std::strlen(fb_last_error()) > 0);
}

TEST_CASE("oracle handle") {
  fb_params p = defaults();
  p.n0 = 1.0;
  fb_oracle* o = nullptr;
  REQUIRE(fb_oracle_create(&p, 400, 0.0, &o) == FB_OK);
  double trec = 0, sum = 0, k = 0;
  CHECK(fb_oracle_recurrence_time(o, &trec) == FB_OK);
  CHECK(trec == doctest::Approx(2 * M_PI * 400 / 240.0));
  CHECK(fb_oracle_coupling_sum(o, &sum) == FB_OK);
  CHECK(sum == doctest::Approx(p.g0 * p.gamma / M_PI * std::atan(20.0)).epsilon(1e-3));
  CHECK(fb_oracle_kernel(o, 0.0, &k) == FB_OK);
  CHECK(k == doctest::Approx(2 * sum));

  const double times[] = {0.0, 1.0, 3.0};
  double prod[3], dressed[3];
  CHECK(fb_oracle_propagate(o, &p, FB_INITIAL_PRODUCT, times, 3, prod) == FB_OK);
  CHECK(fb_oracle_propagate(o, &p, FB_INITIAL_DRESSED, times, 3, dressed) == FB_OK);
  CHECK(prod[0] == doctest::Approx(1.0));
  CHECK(dressed[0] == doctest::Approx(1.0));
  CHECK(dressed[2] != prod[2]);

  fb_params other = p;
  other.g0 = 0.2;
  CHECK(fb_oracle_propagate(o, &other, FB_INITIAL_PRODUCT, times, 3, prod) == FB_ERR_INVALID_ARGUMENT);
  CHECK(fb_oracle_propagate(o, &p, static_cast<fb_initial_correlation>(9), times, 3, prod) ==
        FB_ERR_INVALID_ARGUMENT);
  fb_oracle_destroy(o);

  CHECK(fb_oracle_create(&p, 10, 0.0, &o) == FB_ERR_INVALID_ARGUMENT);
}
