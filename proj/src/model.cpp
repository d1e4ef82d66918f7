#include "fermibath/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fermibath/diagnostics.hpp"
#include "fermibath/errors.hpp"

namespace fermibath {

using cplx = std::complex<double>;

const char* to_string(BathStatistics s) {
  return s == BathStatistics::fermi ? "fermi" : "bose";
}

BathStatistics parse_statistics(const std::string& text) {
  std::string t;
  for (char c : text) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "fermi" || t == "f") return BathStatistics::fermi;
  if (t == "bose" || t == "b") return BathStatistics::bose;
  throw Error(ErrorCode::invalid_argument, "unknown statistics '" + text + "' (expected fermi or bose)");
}

std::vector<std::string> validate(const ModelParams& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_argument, msg); };
  for (double v : {p.Omega, p.g0, p.gamma, p.T, p.mu, p.n0})
    if (!std::isfinite(v)) fail("model parameters must be finite");
  if (!(p.Omega > 0)) fail("Omega must be > 0");
  if (!(p.gamma > 0)) fail("gamma must be > 0");
  if (!(p.g0 >= 0)) fail("g0 must be >= 0");
  if (!(p.T >= 0)) fail("T must be >= 0");
  if (p.statistics == BathStatistics::fermi) {
    if (p.n0 < 0 || p.n0 > 1) fail("Fermi initial occupation n0 must lie in [0, 1]");
  } else {
    if (p.n0 < 0) fail("Bose initial occupation n0 must be >= 0");
    if (p.mu > 0) fail("Bose chemical potential must be <= 0");
  }

  std::vector<std::string> warnings;
  if (p.gamma < 5 * p.Omega) {
    std::ostringstream os;
    os << "gamma = " << p.gamma << " < 5*Omega; the Drude model assumes gamma >> Omega";
    warnings.push_back(os.str());
  }
  for (const auto& w : warnings) warn(w);
  return warnings;
}

double bare_frequency(const ModelParams& p) { return p.Omega + 0.5 * p.g0 * p.gamma; }

double spectral_density(double w, const ModelParams& p) {
  if (w < 0) throw Error(ErrorCode::domain, "spectral_density: negative frequency");
  const double g2 = p.gamma * p.gamma;
  return p.g0 / std::numbers::pi * g2 / (g2 + w * w);
}

cplx coupling_weight(cplx w, const ModelParams& p) {
  const double g2 = p.gamma * p.gamma;
  return p.g0 / std::numbers::pi * g2 * w / (g2 + w * w);
}

namespace {

void bose_domain(double w, const ModelParams& p) {
  std::ostringstream os;
  os << "Bose occupation undefined at w = " << w << " <= mu = " << p.mu;
  throw Error(ErrorCode::domain, os.str());
}

}  // namespace

double occupation_factor(double w, const ModelParams& p) {
  if (p.statistics == BathStatistics::fermi) {
    if (p.T == 0) return w < p.mu ? 1.0 : (w == p.mu ? 0.5 : 0.0);
    const double x = (w - p.mu) / p.T;
    if (x > 0) {
      const double e = std::exp(-x);
      return e / (1 + e);
    }
    return 1 / (1 + std::exp(x));
  }
  if (w <= p.mu) bose_domain(w, p);
  if (p.T == 0) return 0.0;
  return 1 / std::expm1((w - p.mu) / p.T);
}

double vacancy_factor(double w, const ModelParams& p) {
  if (p.statistics == BathStatistics::fermi) {
    if (p.T == 0) return w < p.mu ? 0.0 : (w == p.mu ? 0.5 : 1.0);
    const double x = (w - p.mu) / p.T;
    if (x > 0) return 1 / (1 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1 + e);
  }
  if (w <= p.mu) bose_domain(w, p);
  if (p.T == 0) return 1.0;
  return -1 / std::expm1(-(w - p.mu) / p.T);
}

cplx occupation_factor(cplx w, const ModelParams& p) {
  if (!(w.real() > p.mu))
    throw Error(ErrorCode::domain, "continued occupation factor requires Re w > mu");
  if (p.T == 0) return 0.0;
  const cplx e = std::exp(-(w - p.mu) / p.T);
  if (p.statistics == BathStatistics::fermi) return e / (1.0 + e);
  return e / (1.0 - e);
}

cplx vacancy_factor(cplx w, const ModelParams& p) {
  if (!(w.real() > p.mu))
    throw Error(ErrorCode::domain, "continued occupation factor requires Re w > mu");
  if (p.T == 0) return 1.0;
  const cplx e = std::exp(-(w - p.mu) / p.T);
  if (p.statistics == BathStatistics::fermi) return 1.0 / (1.0 + e);
  return 1.0 / (1.0 - e);
}

}  // namespace fermibath
