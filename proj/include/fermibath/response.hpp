#pragma once

#include <complex>

#include "fermibath/model.hpp"

namespace fermibath {

using cplx = std::complex<double>;

// Roots of (z+gamma)(z-i*Omega) - i*g0*gamma*z = 0.
// z1 -> -gamma and z2 -> i*Omega as g0 -> 0.
struct CharacteristicRoots {
  cplx z1;
  cplx z2;
};

cplx characteristic_polynomial(cplx z, const ModelParams& p);

// Labels are fixed by following the roots along g in [0, g0] (16 steps).
// Throws Error(degenerate_roots) when |z1 - z2| < 1e-8 gamma.
CharacteristicRoots compute_roots(const ModelParams& p);

// K(t) = g0 gamma exp(-gamma t) and its integral over [0, t].
double memory_kernel(double t, const ModelParams& p);
double memory_kernel_integral(double t, const ModelParams& p);

// A*(t) and dA*/dt.
cplx amplitude(double t, const CharacteristicRoots& r, const ModelParams& p);
cplx amplitude_derivative(double t, const CharacteristicRoots& r, const ModelParams& p);

// B*_w(t) and dB*_w/dt. Throws Error(resonance_pole) when w hits -i z_k.
cplx bath_response(double w, double t, const CharacteristicRoots& r, const ModelParams& p);
cplx bath_response_derivative(double w, double t, const CharacteristicRoots& r,
                              const ModelParams& p);

// Partial fractions of b = -B*_w(t) = X(w) e^{iwt} + c1(w) e^{z1 t} + c2(w) e^{z2 t}.
// All three are rational in w, so they continue analytically off the real axis.
struct ResponseFractions {
  cplx z1, z2;
  double gamma;

  ResponseFractions(const CharacteristicRoots& r, const ModelParams& p)
      : z1(r.z1), z2(r.z2), gamma(p.gamma) {}

  cplx steady(cplx w) const {
    const cplx iw(-w.imag(), w.real());
    return (iw + gamma) / ((iw - z1) * (iw - z2));
  }
  cplx c1(cplx w) const {
    const cplx iw(-w.imag(), w.real());
    return (z1 + gamma) / ((z1 - z2) * (z1 - iw));
  }
  cplx c2(cplx w) const {
    const cplx iw(-w.imag(), w.real());
    return (z2 + gamma) / ((z2 - z1) * (z2 - iw));
  }
};

}  // namespace fermibath
