#pragma once

// Panel-adaptive Gauss-Kronrod (7/15) integration over [0, inf).
//
// The core [0, W] is split into panels no wider than pi/(4 max(t, 1/gamma))
// (relaxed 4x above the resolved band), refined worst-first until the summed
// error estimate meets max(rel_tol |I|, abs_tol) in every component.
// Beyond W the tail is either bounded by a power-law envelope fitted on
// [W/2, W] (extending W when the bound is too large) or integrated: the
// smooth part by w = W/u, the oscillating part Re[e^{iwt} Q(w)] along the
// ray w = W + i s where e^{iwt} decays.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <thread>
#include <vector>

#include "fermibath/errors.hpp"

namespace fermibath {

enum class TailRule {
  automatic,  // mapped when a split tail is given or nothing oscillates, else envelope
  envelope,
  mapped,
};

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  std::size_t max_panels = std::size_t(1) << 22;
  double oscillation_time = 0.0;  // t of e^{iwt} factors in the integrand
  double memory_time = 0.0;       // 1/gamma
  double panel_scale = 1.0;
  double w_max = 0.0;             // W; 0 picks 20/memory_time (or 50)
  double resolved_band = 0.0;     // oscillation width bound applies on [0, band]; 0 means all of [0, W]
  TailRule tail_rule = TailRule::automatic;
  double tail_power = 3.0;        // envelope |f| ~ w^-p
  int max_extensions = 10;
  std::vector<double> breakpoints;
  unsigned threads = 1;
};

// max(20 gamma, Omega + 50 T, 10 Omega, mu + 50 T)
double default_w_max(double gamma, double Omega, double T, double mu);

// Throws Error(invalid_argument) for a malformed spec.
void validate(const QuadratureSpec& spec);

template <int K>
using QVec = Eigen::Matrix<double, K, 1>;
template <int K>
using QCVec = Eigen::Matrix<std::complex<double>, K, 1>;

template <int K>
struct QuadratureResultN {
  QVec<K> value = QVec<K>::Zero();
  QVec<K> error_estimate = QVec<K>::Zero();
  std::size_t panels_used = 0;
  double truncation_bound = 0.0;
  double w_max = 0.0;
  bool converged = false;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels_used = 0;
  double truncation_bound = 0.0;
  double w_max = 0.0;
  bool converged = false;
};

struct ComplexQuadratureResult {
  std::complex<double> value;
  std::complex<double> error_estimate;
  std::size_t panels_used = 0;
  double truncation_bound = 0.0;
  double w_max = 0.0;
  bool converged = false;
};

// Integrand beyond W written as smooth(w) + Re[e^{i w t} oscillating(w)].
// oscillating() must be analytic and decaying for Re w >= W, Im w >= 0.
template <int K>
struct SplitTail {
  std::function<QVec<K>(double)> smooth;
  std::function<QCVec<K>(std::complex<double>)> oscillating;
  double frequency = 0.0;
};

namespace detail {

inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <int K>
struct Panel {
  double a = 0, b = 0;
  QVec<K> value, error;
  double priority = 0;
};

template <int K>
struct PanelOrder {
  bool operator()(const Panel<K>& x, const Panel<K>& y) const { return x.priority < y.priority; }
};

// Observes |f| w^p at nodes with w >= from.
template <int K>
struct EnvelopeProbe {
  double from = std::numeric_limits<double>::infinity();
  double power = 3.0;
  QVec<K> peak = QVec<K>::Zero();
  void observe(double w, const QVec<K>& v) {
    if (w < from) return;
    const double s = std::pow(w, power);
    peak = peak.cwiseMax(v.cwiseAbs() * s);
  }
};

template <int K, class F>
QVec<K> call(F& f, double w) {
  QVec<K> v = f(w);
  if (!v.allFinite()) {
    std::ostringstream os;
    os << "integrand is not finite at w = " << w;
    throw NonFiniteIntegrand(os.str(), w);
  }
  return v;
}

template <int K, class F>
void evaluate(F& f, Panel<K>& p, EnvelopeProbe<K>* probe) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double c = 0.5 * (p.a + p.b);
  const double h = 0.5 * (p.b - p.a);
  QVec<K> fv1[7], fv2[7];
  const QVec<K> fc = call<K>(f, c);
  if (probe) probe->observe(c, fc);
  QVec<K> resk = fc * wgk[7];
  QVec<K> resg = fc * wg[3];
  QVec<K> resabs = fc.cwiseAbs() * wgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * xgk[j];
    fv1[j] = call<K>(f, c - x);
    fv2[j] = call<K>(f, c + x);
    if (probe) {
      probe->observe(c - x, fv1[j]);
      probe->observe(c + x, fv2[j]);
    }
    resk += wgk[j] * (fv1[j] + fv2[j]);
    resabs += wgk[j] * (fv1[j].cwiseAbs() + fv2[j].cwiseAbs());
    if (j % 2 == 1) resg += wg[j / 2] * (fv1[j] + fv2[j]);
  }
  const QVec<K> mean = 0.5 * resk;
  QVec<K> resasc = wgk[7] * (fc - mean).cwiseAbs();
  for (int j = 0; j < 7; ++j)
    resasc += wgk[j] * ((fv1[j] - mean).cwiseAbs() + (fv2[j] - mean).cwiseAbs());
  const double ah = std::abs(h);
  p.value = resk * h;
  QVec<K> err = ((resk - resg) * h).cwiseAbs();
  resasc *= ah;
  resabs *= ah;
  for (int k = 0; k < K; ++k) {
    double e = err[k];
    if (resasc[k] != 0 && e != 0) e = resasc[k] * std::min(1.0, std::pow(200 * e / resasc[k], 1.5));
    if (resabs[k] > uflow / (50 * eps)) e = std::max(50 * eps * resabs[k], e);
    err[k] = e;
  }
  p.error = err;
}

// Neumaier-compensated accumulation of panel values.
template <int K>
struct Accumulator {
  QVec<K> sum = QVec<K>::Zero(), comp = QVec<K>::Zero();
  void add(const QVec<K>& v) {
    for (int k = 0; k < K; ++k) {
      const double t = sum[k] + v[k];
      if (std::abs(sum[k]) >= std::abs(v[k]))
        comp[k] += (sum[k] - t) + v[k];
      else
        comp[k] += (v[k] - t) + sum[k];
      sum[k] = t;
    }
  }
  QVec<K> total() const { return sum + comp; }
};

template <int K>
struct AdaptResult {
  QVec<K> value = QVec<K>::Zero();
  QVec<K> error = QVec<K>::Zero();
  std::size_t panels = 0;
  bool converged = false;
};

template <int K, class F>
void evaluate_all(F& f, std::vector<Panel<K>>& panels, EnvelopeProbe<K>* probe, unsigned threads) {
  const std::size_t n = panels.size();
  if (threads <= 1 || n < 256) {
    for (auto& p : panels) evaluate<K>(f, p, probe);
    return;
  }
  const unsigned nt = std::min<std::size_t>(threads, n / 64);
  std::vector<EnvelopeProbe<K>> probes(nt, probe ? *probe : EnvelopeProbe<K>{});
  std::vector<std::exception_ptr> errors(nt);
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < nt; ++i) {
    pool.emplace_back([&, i] {
      try {
        const std::size_t lo = n * i / nt, hi = n * (i + 1) / nt;
        for (std::size_t j = lo; j < hi; ++j) evaluate<K>(f, panels[j], probe ? &probes[i] : nullptr);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (probe)
    for (auto& pr : probes) probe->peak = probe->peak.cwiseMax(pr.peak);
}

template <int K, class F>
AdaptResult<K> adapt(F& f, std::vector<Panel<K>> panels, double rel_tol, const QVec<K>& abs_tol,
                     std::size_t max_panels, EnvelopeProbe<K>* probe, unsigned threads) {
  AdaptResult<K> out;
  if (panels.empty()) {
    out.converged = true;
    return out;
  }
  evaluate_all<K>(f, panels, probe, threads);

  Accumulator<K> fixed_value;
  QVec<K> fixed_error = QVec<K>::Zero();
  QVec<K> total = QVec<K>::Zero(), total_err = QVec<K>::Zero();
  {
    Accumulator<K> acc;
    for (const auto& p : panels) {
      acc.add(p.value);
      total_err += p.error;
    }
    total = acc.total();
  }
  auto tolerance = [&](const QVec<K>& value) {
    return (rel_tol * value.cwiseAbs()).cwiseMax(abs_tol);
  };
  QVec<K> tol = tolerance(total);
  auto priority = [&](const Panel<K>& p) { return (p.error.array() / tol.array()).maxCoeff(); };

  // panels that can never matter are folded into fixed sums to bound memory
  const double fold = 1e-3 / static_cast<double>(panels.size());
  std::priority_queue<Panel<K>, std::vector<Panel<K>>, PanelOrder<K>> heap;
  std::size_t count = panels.size();
  {
    std::vector<Panel<K>> live;
    for (auto& p : panels) {
      p.priority = priority(p);
      if (p.priority < fold) {
        fixed_value.add(p.value);
        fixed_error += p.error;
      } else {
        live.push_back(p);
      }
    }
    panels.clear();
    panels.shrink_to_fit();
    heap = decltype(heap)(PanelOrder<K>{}, std::move(live));
  }

  auto done = [&] { return (total_err.array() <= tol.array()).all(); };
  while (!done() && count < max_panels && !heap.empty()) {
    Panel<K> p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b) || (p.b - p.a) <= 1e-13 * std::max(std::abs(p.a), std::abs(p.b))) {
      fixed_value.add(p.value);
      fixed_error += p.error;
      continue;
    }
    Panel<K> l, r;
    l.a = p.a;
    l.b = mid;
    r.a = mid;
    r.b = p.b;
    evaluate<K>(f, l, probe);
    evaluate<K>(f, r, probe);
    total += l.value + r.value - p.value;
    total_err += l.error + r.error - p.error;
    total_err = total_err.cwiseMax(0.0);
    tol = tolerance(total);
    l.priority = priority(l);
    r.priority = priority(r);
    heap.push(l);
    heap.push(r);
    ++count;
  }

  // recompute sums from the final partition
  Accumulator<K> acc = fixed_value;
  QVec<K> err = fixed_error;
  while (!heap.empty()) {
    acc.add(heap.top().value);
    err += heap.top().error;
    heap.pop();
  }
  out.value = acc.total();
  out.error = err;
  out.panels = count;
  out.converged = (err.array() <= tolerance(out.value).array()).all();
  return out;
}

inline void push_uniform(std::vector<double>& cuts, double a, double b, double h) {
  const double len = b - a;
  std::size_t n = std::isfinite(h) && h > 0 ? static_cast<std::size_t>(std::ceil(len / h)) : 1;
  n = std::max<std::size_t>(n, 2);
  for (std::size_t i = 1; i <= n; ++i) cuts.push_back(a + len * static_cast<double>(i) / n);
}

template <int K>
std::vector<Panel<K>> partition(double a, double b, const QuadratureSpec& spec, double band) {
  const double tmax = std::max(spec.oscillation_time, spec.memory_time);
  const double h = tmax > 0 ? spec.panel_scale * (std::numbers::pi / 4) / tmax : std::numeric_limits<double>::infinity();
  std::vector<double> knots{a, b};
  for (double x : spec.breakpoints)
    if (x > a && x < b) knots.push_back(x);
  if (band > a && band < b) knots.push_back(band);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> cuts{knots.front()};
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i], hi = knots[i + 1];
    push_uniform(cuts, lo, hi, lo < band ? h : 4 * h);
  }
  std::vector<Panel<K>> panels;
  panels.reserve(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel<K> p;
    p.a = cuts[i];
    p.b = cuts[i + 1];
    if (p.b > p.a) panels.push_back(p);
  }
  return panels;
}

template <int K>
std::vector<Panel<K>> uniform_panels(double a, double b, std::size_t n) {
  std::vector<Panel<K>> panels(n);
  for (std::size_t i = 0; i < n; ++i) {
    panels[i].a = a + (b - a) * static_cast<double>(i) / n;
    panels[i].b = a + (b - a) * static_cast<double>(i + 1) / n;
  }
  return panels;
}

}  // namespace detail

// Adaptive integral over a finite interval [a, b].
template <int K, class F>
QuadratureResultN<K> integrate_interval(F&& f, double a, double b, const QuadratureSpec& spec) {
  validate(spec);
  QuadratureSpec local = spec;
  local.breakpoints.clear();
  for (double x : spec.breakpoints)
    if (x > a && x < b) local.breakpoints.push_back(x);
  auto panels = detail::partition<K>(a, b, local, b);
  auto r = detail::adapt<K>(f, std::move(panels), spec.rel_tol, QVec<K>::Constant(spec.abs_tol),
                            spec.max_panels, nullptr, spec.threads);
  QuadratureResultN<K> out;
  out.value = r.value;
  out.error_estimate = r.error;
  out.panels_used = r.panels;
  out.converged = r.converged;
  out.w_max = b;
  return out;
}

template <int K, class F>
QuadratureResultN<K> integrate_semi_infinite(F&& f, const QuadratureSpec& spec,
                                             const SplitTail<K>* tail = nullptr) {
  validate(spec);
  double W = spec.w_max > 0 ? spec.w_max : (spec.memory_time > 0 ? 20 / spec.memory_time : 50.0);
  const double band = spec.resolved_band > 0 ? std::min(spec.resolved_band, W) : W;
  TailRule rule = spec.tail_rule;
  if (rule == TailRule::automatic)
    rule = (tail || spec.oscillation_time == 0) ? TailRule::mapped : TailRule::envelope;

  QuadratureResultN<K> out;
  detail::EnvelopeProbe<K> probe;
  probe.power = spec.tail_power;
  probe.from = rule == TailRule::envelope ? 0.5 * W : std::numeric_limits<double>::infinity();

  auto core = detail::adapt<K>(f, detail::partition<K>(0.0, W, spec, band), spec.rel_tol,
                               QVec<K>::Constant(spec.abs_tol), spec.max_panels, &probe, spec.threads);
  QVec<K> value = core.value;
  QVec<K> error = core.error;
  std::size_t panels = core.panels;
  bool converged = core.converged;
  auto tolerance = [&] { return (spec.rel_tol * value.cwiseAbs()).cwiseMax(spec.abs_tol); };

  if (rule == TailRule::envelope) {
    const double p = spec.tail_power;
    auto bound = [&](double w) { return QVec<K>(probe.peak * std::pow(w, 1 - p) / (p - 1)); };
    QVec<K> tb = bound(W);
    int ext = 0;
    while ((tb.array() > 0.5 * tolerance().array()).any() && ext < spec.max_extensions) {
      probe.from = W;
      probe.peak.setZero();
      QuadratureSpec far = spec;
      far.resolved_band = 0;
      auto part = detail::partition<K>(W, 2 * W, far, 0.0);
      auto r = detail::adapt<K>(f, std::move(part), spec.rel_tol, QVec<K>::Constant(spec.abs_tol),
                                spec.max_panels, &probe, spec.threads);
      value += r.value;
      error += r.error;
      panels += r.panels;
      converged = converged && r.converged;
      W *= 2;
      tb = bound(W);
      ++ext;
    }
    error += tb;
    out.truncation_bound = tb.maxCoeff();
    converged = converged && (error.array() <= tolerance().array()).all();
  } else {
    const QVec<K> tail_tol = (0.1 * tolerance()).cwiseMax(0.1 * spec.abs_tol);
    QuadratureSpec ts = spec;
    ts.breakpoints.clear();
    ts.oscillation_time = 0;
    ts.memory_time = 0;

    std::function<QVec<K>(double)> smooth;
    if (tail)
      smooth = tail->smooth;
    else
      smooth = [&f](double w) { return QVec<K>(f(w)); };
    auto mapped = [&](double u) { return QVec<K>(smooth(W / u) * (W / (u * u))); };
    auto rs = detail::adapt<K>(mapped, detail::uniform_panels<K>(0.0, 1.0, 8), spec.rel_tol, tail_tol,
                               spec.max_panels, nullptr, 1);
    QVec<K> tail_value = rs.value;
    QVec<K> tail_error = rs.error;
    panels += rs.panels;
    converged = converged && rs.converged;

    if (tail && tail->oscillating) {
      const double t = tail->frequency;
      const double sigma = t > 0 ? std::min(W, 1 / t) : W;
      const std::complex<double> phase = std::polar(1.0, W * t) * std::complex<double>(0, 1);
      auto ray = [&](double x) {
        const double s = sigma * x / (1 - x);
        const double jac = sigma / ((1 - x) * (1 - x));
        const double damp = std::exp(-s * t);
        QVec<K> v = QVec<K>::Zero();
        if (damp == 0) return v;
        const QCVec<K> q = tail->oscillating(std::complex<double>(W, s));
        for (int k = 0; k < K; ++k) v[k] = std::real(phase * q[k]) * damp * jac;
        return v;
      };
      auto ro = detail::adapt<K>(ray, detail::uniform_panels<K>(0.0, 1.0, 8), spec.rel_tol, tail_tol,
                                 spec.max_panels, nullptr, 1);
      tail_value += ro.value;
      tail_error += ro.error;
      panels += ro.panels;
      converged = converged && ro.converged;
    }
    value += tail_value;
    error += tail_error;
    out.truncation_bound = tail_error.maxCoeff();
    converged = converged && (error.array() <= tolerance().array()).all();
  }

  out.value = value;
  out.error_estimate = error;
  out.panels_used = panels;
  out.w_max = W;
  out.converged = converged;
  return out;
}

// Scalar convenience wrappers.
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         const QuadratureSpec& spec);
ComplexQuadratureResult integrate_semi_infinite_complex(
    const std::function<std::complex<double>(double)>& f, const QuadratureSpec& spec);

// Throws QuadratureFailure (first component) when r did not converge.
template <int K>
void require_converged(const QuadratureResultN<K>& r, const char* what) {
  if (r.converged) return;
  int k = 0;
  (r.error_estimate.array() / (r.value.cwiseAbs().array() + 1e-300)).maxCoeff(&k);
  std::ostringstream os;
  os << what << ": quadrature did not converge (estimate " << r.value[k] << " +- "
     << r.error_estimate[k] << " after " << r.panels_used << " panels)";
  throw QuadratureFailure(os.str(), r.value[k], r.error_estimate[k]);
}

}  // namespace fermibath
