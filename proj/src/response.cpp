#include "fermibath/response.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "fermibath/errors.hpp"

namespace fermibath {

namespace {

constexpr cplx I(0.0, 1.0);

// Both roots of z^2 + b z + c with b = gamma - i Omega - i g gamma, c = -i Omega gamma.
std::pair<cplx, cplx> quadratic_roots(double g, const ModelParams& p) {
  const cplx b(p.gamma, -p.Omega - g * p.gamma);
  const cplx c(0.0, -p.Omega * p.gamma);
  cplx s = std::sqrt(b * b - 4.0 * c);
  // pick the sign avoiding cancellation, recover the partner from z1 z2 = c
  if (std::real(std::conj(b) * s) < 0) s = -s;
  const cplx big = -0.5 * (b + s);
  const cplx small = c / big;
  return {big, small};
}

cplx newton_polish(cplx z, const ModelParams& p) {
  const cplx b(p.gamma, -p.Omega - p.g0 * p.gamma);
  const cplx c(0.0, -p.Omega * p.gamma);
  const cplx f = z * z + b * z + c;
  const cplx df = 2.0 * z + b;
  if (std::abs(df) == 0) return z;
  return z - f / df;
}

void check_resonance(cplx d, double w) {
  if (std::abs(d) == 0) {
    std::ostringstream os;
    os << "bath response has a pole on the real axis at w = " << w
       << " (zero coupling resonance)";
    throw Error(ErrorCode::resonance_pole, os.str());
  }
}

}  // namespace

cplx characteristic_polynomial(cplx z, const ModelParams& p) {
  return (z + p.gamma) * (z - I * p.Omega) - I * p.g0 * p.gamma * z;
}

CharacteristicRoots compute_roots(const ModelParams& p) {
  if (!(p.g0 >= 0)) throw Error(ErrorCode::invalid_argument, "compute_roots: g0 must be >= 0");
  cplx z1(-p.gamma, 0.0);
  cplx z2(0.0, p.Omega);
  constexpr int steps = 16;
  for (int k = 1; k <= steps; ++k) {
    const double g = p.g0 * k / steps;
    auto [a, b] = quadratic_roots(g, p);
    const double keep = std::abs(a - z1) + std::abs(b - z2);
    const double swap = std::abs(b - z1) + std::abs(a - z2);
    if (swap < keep) std::swap(a, b);
    z1 = a;
    z2 = b;
  }
  z1 = newton_polish(z1, p);
  z2 = newton_polish(z2, p);
  if (std::abs(z1 - z2) < 1e-8 * p.gamma) {
    std::ostringstream os;
    os << "characteristic roots are degenerate (|z1 - z2| = " << std::abs(z1 - z2) << ")";
    throw Error(ErrorCode::degenerate_roots, os.str());
  }
  return {z1, z2};
}

double memory_kernel(double t, const ModelParams& p) {
  return p.g0 * p.gamma * std::exp(-p.gamma * t);
}

double memory_kernel_integral(double t, const ModelParams& p) {
  return -p.g0 * std::expm1(-p.gamma * t);
}

cplx amplitude(double t, const CharacteristicRoots& r, const ModelParams& p) {
  const cplx shift(p.gamma, -p.g0 * p.gamma);
  const cplx d = r.z1 - r.z2;
  return std::exp(t * r.z1) * (r.z1 + shift) / d - std::exp(t * r.z2) * (r.z2 + shift) / d;
}

cplx amplitude_derivative(double t, const CharacteristicRoots& r, const ModelParams& p) {
  const cplx shift(p.gamma, -p.g0 * p.gamma);
  const cplx d = r.z1 - r.z2;
  return r.z1 * std::exp(t * r.z1) * (r.z1 + shift) / d -
         r.z2 * std::exp(t * r.z2) * (r.z2 + shift) / d;
}

cplx bath_response(double w, double t, const CharacteristicRoots& r, const ModelParams& p) {
  const cplx& z1 = r.z1;
  const cplx& z2 = r.z2;
  const cplx d1 = w + I * z1;
  const cplx d2 = w + I * z2;
  check_resonance(d1, w);
  check_resonance(d2, w);
  const cplx num = std::exp(I * (t * w)) * (z1 - z2) * (I * w + p.gamma) +
                   std::exp(t * z1) * (-I * w + z2) * (z1 + p.gamma) +
                   I * std::exp(t * z2) * d1 * (z2 + p.gamma);
  return num / (d1 * (z1 - z2) * d2);
}

cplx bath_response_derivative(double w, double t, const CharacteristicRoots& r,
                              const ModelParams& p) {
  const cplx& z1 = r.z1;
  const cplx& z2 = r.z2;
  const cplx d1 = w + I * z1;
  const cplx d2 = w + I * z2;
  check_resonance(d1, w);
  check_resonance(d2, w);
  const cplx num = I * w * std::exp(I * (t * w)) * (z1 - z2) * (I * w + p.gamma) +
                   z1 * std::exp(t * z1) * (-I * w + z2) * (z1 + p.gamma) +
                   I * z2 * std::exp(t * z2) * d1 * (z2 + p.gamma);
  return num / (d1 * (z1 - z2) * d2);
}

}  // namespace fermibath
