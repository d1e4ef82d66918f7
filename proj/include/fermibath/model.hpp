#pragma once

#include <complex>
#include <string>
#include <vector>

namespace fermibath {

// hbar = k_B = 1; energies in MeV, times in 1/MeV.
struct UnitSystem {
  static constexpr const char* energy_unit = "MeV";
  static constexpr const char* time_unit = "1/MeV";
  static constexpr double hbar = 1.0;
  static constexpr double k_B = 1.0;
};

enum class BathStatistics { fermi, bose };

const char* to_string(BathStatistics s);
// Accepts "fermi"/"bose" (case-insensitive); throws Error(invalid_argument) otherwise.
BathStatistics parse_statistics(const std::string& text);

struct ModelParams {
  double Omega = 1.0;  // renormalized frequency
  double g0 = 0.1;     // dimensionless coupling
  double gamma = 12.0; // Drude cutoff, inverse memory time
  double T = 1.0;      // temperature
  double mu = 0.0;     // chemical potential of the bath
  BathStatistics statistics = BathStatistics::fermi;
  double n0 = 0.0;     // initial occupation of the collective mode
};

// Throws Error(invalid_argument) on a hard violation; returns soft warnings
// (also forwarded to the warning sink).
std::vector<std::string> validate(const ModelParams& p);

// omega = Omega + g0*gamma/2
double bare_frequency(const ModelParams& p);

// g^2/w density: (g0/pi) gamma^2/(gamma^2+w^2), w >= 0
double spectral_density(double w, const ModelParams& p);

// w * spectral_density(w), the weight multiplying |B_w|^2 n(w); analytic in w.
std::complex<double> coupling_weight(std::complex<double> w, const ModelParams& p);

// Equilibrium occupation of a bath mode at energy w.
double occupation_factor(double w, const ModelParams& p);
// 1 - n (Fermi) or 1 + n (Bose).
double vacancy_factor(double w, const ModelParams& p);

// Analytic continuations, valid for Re w > mu.
std::complex<double> occupation_factor(std::complex<double> w, const ModelParams& p);
std::complex<double> vacancy_factor(std::complex<double> w, const ModelParams& p);

}  // namespace fermibath
