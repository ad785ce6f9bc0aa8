#pragma once

#include <complex>
#include <string>

namespace floquet {

using Complex = std::complex<double>;

// Floquet quasi-energy in hartree. Decaying states have imag() < 0.
using ComplexEnergy = Complex;

// Square well 0 <= x < a, oscillating barrier a <= x <= b (height V0 + V1 cos wt),
// flat outer region x > b at V0'. Atomic units, hbar = 1.
struct WellParams {
  double a = 1.0;
  double b = 2.0;
  double v0 = 15.0;
  double v0_prime = 7.5;
  double v1 = 0.0;
  double omega = 0.0;
  double mass = 1.0;

  double barrier_width() const { return b - a; }
  bool is_static() const { return v1 == 0.0; }

  // Throws InvalidParams naming the violated constraint.
  void validate() const;

  WellParams with_v1(double value) const {
    WellParams p = *this;
    p.v1 = value;
    return p;
  }
  WellParams with_omega(double value) const {
    WellParams p = *this;
    p.omega = value;
    return p;
  }
};

// The worked example: a = 1, b = 2, V0 = 15, V0' = V0/2, m = 1.
WellParams reference_well();

// Sideband cutoff; indices run over -n..+n.
struct Truncation {
  int n = 0;

  int channels() const { return 2 * n + 1; }
  // Position of sideband index `index` in a (2n+1)-array.
  int slot(int index) const { return index + n; }
  int index(int slot) const { return slot - n; }

  friend bool operator==(const Truncation&, const Truncation&) = default;
};

// max(2, ceil(V1/omega) + 1) whenever omega > 0 (also at V1 = 0, so a
// continuation in V1 keeps its channel set); 0 without a frequency.
Truncation default_truncation(const WellParams& params);

// True when n > V1/omega (the static well accepts any n).
bool satisfies_truncation_rule(const WellParams& params, Truncation truncation);

// V1/omega. Throws DomainError when omega <= 0.
double alpha(const WellParams& params);

struct ZoneReduced {
  ComplexEnergy eps;  // real part in [0, omega)
  long shift = 0;     // original.real() == eps.real() + shift * omega
};

// Maps eps to its first-zone representative; the imaginary part is untouched.
ZoneReduced reduce_to_first_zone(ComplexEnergy eps, double omega);

// Reduces a real difference to (-omega/2, omega/2].
double reduce_symmetric(double value, double omega);

}  // namespace floquet
