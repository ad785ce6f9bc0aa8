#include "floquet/staticwell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "floquet/problem.hpp"

namespace floquet {

namespace {

WellParams undriven(WellParams params) {
  params.v1 = 0.0;
  params.omega = 0.0;
  return params;
}

}  // namespace

std::vector<ComplexEnergy> StaticSpectrum::levels() const {
  std::vector<ComplexEnergy> out(bound.begin(), bound.end());
  out.insert(out.end(), resonances.begin(), resonances.end());
  return out;
}

double static_condition(const WellParams& params, double energy) {
  return matching_determinant(undriven(params), energy, Truncation{0}).real();
}

StaticSpectrum solve_static(const WellParams& params, const StaticOptions& options) {
  const WellParams well = undriven(params);
  well.validate();
  StaticSpectrum spectrum;

  // Bound states: sign scan on (0, V0') and bisection.
  if (well.v0_prime > 0.0) {
    const int n = options.scan_points;
    const double top = well.v0_prime;
    auto energy_at = [&](int i) { return top * (static_cast<double>(i) + 0.5) / n; };
    double prev_e = energy_at(0);
    double prev_f = static_condition(well, prev_e);
    for (int i = 1; i < n; ++i) {
      const double e = energy_at(i);
      const double fe = static_condition(well, e);
      if (fe == 0.0) {
        spectrum.bound.push_back(e);
      } else if ((prev_f < 0.0) != (fe < 0.0) && prev_f != 0.0) {
        double lo = prev_e, hi = e, flo = prev_f;
        while (hi - lo > options.bisection_tolerance * std::max(1.0, hi)) {
          const double mid = 0.5 * (lo + hi);
          const double fm = static_condition(well, mid);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        spectrum.bound.push_back(0.5 * (lo + hi));
      }
      prev_e = e;
      prev_f = fe;
    }
  }

  // Resonances: argument-principle search seeded by the infinite-well levels.
  const ComplexBox box = options.search_box.value_or(
      ComplexBox{well.v0_prime, well.v0, -0.1 * (well.v0 - well.v0_prime), 0.0});
  const FloquetProblem problem(well, Truncation{0});
  std::vector<ComplexEnergy> found;
  for (const RootResult& r : problem.find_all(box))
    if (r.converged) found.push_back(r.eps);
  for (int level = 1;; ++level) {
    const double guess = level * level * std::numbers::pi * std::numbers::pi / (2.0 * well.mass * well.a * well.a);
    if (guess >= well.v0) break;
    if (guess <= well.v0_prime) continue;
    const RootResult r = problem.polish(Complex(guess, -1e-3 * (well.v0 - well.v0_prime)));
    if (r.converged && box.contains(r.eps)) found.push_back(r.eps);
  }
  for (const ComplexEnergy& eps : found) {
    if (!(eps.imag() < 0.0) || eps.real() <= well.v0_prime || eps.real() >= well.v0) continue;
    const bool duplicate = std::any_of(spectrum.resonances.begin(), spectrum.resonances.end(),
                                       [&](ComplexEnergy r) { return std::abs(r - eps) < 1e-8; });
    if (!duplicate) spectrum.resonances.push_back(eps);
  }
  std::sort(spectrum.resonances.begin(), spectrum.resonances.end(),
            [](ComplexEnergy x, ComplexEnergy y) { return x.real() < y.real(); });
  return spectrum;
}

}  // namespace floquet
