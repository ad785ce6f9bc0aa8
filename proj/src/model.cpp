#include "floquet/model.hpp"

#include <cmath>
#include <sstream>

#include "floquet/error.hpp"

namespace floquet {

namespace {

[[noreturn]] void reject(const std::string& key, const std::string& constraint, double value) {
  std::ostringstream os;
  os.precision(17);
  os << key << " = " << value << " violates " << constraint;
  throw InvalidParams(os.str());
}

}  // namespace

void WellParams::validate() const {
  if (!(a > 0.0)) reject("a", "0 < a", a);
  if (!(b > a)) reject("b", "a < b", b);
  if (!(mass > 0.0)) reject("mass", "mass > 0", mass);
  if (!std::isfinite(v0)) reject("v0", "finite v0", v0);
  if (!(v0_prime < v0)) reject("v0_prime", "v0_prime < v0", v0_prime);
  if (!(v1 >= 0.0)) reject("v1", "v1 >= 0", v1);
  if (!(v1 < v0 - v0_prime)) reject("v1", "v1 < v0 - v0_prime", v1);
  if (v1 > 0.0 && !(omega > 0.0)) reject("omega", "omega > 0 when v1 > 0", omega);
  if (omega < 0.0) reject("omega", "omega >= 0", omega);
}

WellParams reference_well() {
  WellParams p;
  p.a = 1.0;
  p.b = 2.0;
  p.v0 = 15.0;
  p.v0_prime = 7.5;
  p.mass = 1.0;
  return p;
}

Truncation default_truncation(const WellParams& params) {
  if (!(params.omega > 0.0)) return Truncation{0};
  return Truncation{std::max(2, static_cast<int>(std::ceil(alpha(params))) + 1)};
}

bool satisfies_truncation_rule(const WellParams& params, Truncation truncation) {
  if (truncation.n < 0) return false;
  if (params.is_static()) return true;
  return truncation.n > alpha(params);
}

double alpha(const WellParams& params) {
  if (!(params.omega > 0.0)) throw DomainError("alpha: omega must be > 0 (static problem; no driving)");
  return params.v1 / params.omega;
}

ZoneReduced reduce_to_first_zone(ComplexEnergy eps, double omega) {
  if (!(omega > 0.0)) throw DomainError("reduce_to_first_zone: omega must be > 0");
  double shift = std::floor(eps.real() / omega);
  double re = eps.real() - shift * omega;
  // floor() can leave re == omega after rounding.
  if (re >= omega) {
    re -= omega;
    shift += 1.0;
  }
  if (re < 0.0) re = 0.0;
  return {ComplexEnergy(re, eps.imag()), static_cast<long>(shift)};
}

double reduce_symmetric(double value, double omega) {
  double r = value - omega * std::round(value / omega);
  if (r <= -0.5 * omega) r += omega;
  return r;
}

}  // namespace floquet
