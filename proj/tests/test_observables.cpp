#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floquet/error.hpp"
#include "floquet/observables.hpp"
#include "floquet/problem.hpp"
#include "floquet/staticwell.hpp"

using namespace floquet;

namespace {

const WellParams kWell = reference_well();

FloquetState solved(const WellParams& p, Complex seed, Truncation n) {
  const FloquetProblem problem(p, n);
  const RootResult r = problem.polish(seed);
  REQUIRE(r.converged);
  return problem.state(r.eps);
}

// Composite Simpson over [0, b] on a fine grid.
double trapped(const FloquetState& s, const WellParams& p, double t) {
  auto simpson = [&](double lo, double hi) {
    const int n = 4000;
    const double h = (hi - lo) / n;
    double sum = wavefunction_density(s, p, lo, t) + wavefunction_density(s, p, hi, t);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * wavefunction_density(s, p, lo + i * h, t);
    return sum * h / 3.0;
  };
  return simpson(0.0, p.a) + simpson(p.a, p.b);
}

}  // namespace

TEST_CASE("density vanishes at the wall and is confined to [0, b]") {
  const WellParams p = kWell.with_v1(1.5).with_omega(0.7 * 15);
  const FloquetState s = solved(p, {3.48, 0.0}, Truncation{2});
  CHECK(wavefunction_density(s, p, 0.0, 0.37) == 0.0);
  CHECK_THROWS_AS(wavefunction_density(s, p, 2.01, 0.0), DomainError);
  CHECK_THROWS_AS(wavefunction_density(s, p, -0.01, 0.0), DomainError);
}

TEST_CASE("bound state density is stationary") {
  const FloquetState s = solved(kWell, {3.48, 0.0}, Truncation{0});
  for (double x : {0.3, 1.0, 1.7})
    CHECK(wavefunction_density(s, kWell, x, 0.0) == doctest::Approx(wavefunction_density(s, kWell, x, 12.3)).epsilon(1e-12));
}

TEST_CASE("driven density is periodic up to the decay factor") {
  const WellParams p = kWell.with_v1(1.5).with_omega(0.7 * 15);
  const FloquetState s = solved(p, {12.974, -0.038}, Truncation{2});
  const double period = 2.0 * std::numbers::pi / p.omega;
  for (double x : {0.4, 1.2, 1.9})
    for (double t : {0.0, 0.11, 0.5}) {
      const double later = wavefunction_density(s, p, x, t + period);
      CHECK(later == doctest::Approx(wavefunction_density(s, p, x, t) * std::exp(2.0 * s.eps.imag() * period)).epsilon(1e-10));
    }
}

TEST_CASE("static resonance decays exponentially") {
  const Complex e1 = solve_static(kWell).resonances.at(0);
  const FloquetState s = solved(kWell, e1, Truncation{0});
  const double lifetime = 1.0 / (2.0 * std::abs(e1.imag()));
  const SurvivalSeries series = survival(s, kWell, {0.0, lifetime, 3.0 * lifetime});
  CHECK(series.P[0] == 1.0);
  CHECK(series.P[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(series.P[2] == doctest::Approx(std::exp(-3.0)).epsilon(1e-10));
  for (double h : series.h) CHECK(h == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("undriven sidebands leave h flat") {
  const WellParams p = kWell.with_omega(0.45 * 15);
  const FloquetState s = solved(p, solve_static(kWell).resonances.at(0), Truncation{2});
  std::vector<double> times;
  for (int i = 0; i < 50; ++i) times.push_back(0.1 * i);
  const SurvivalSeries series = survival(s, p, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(series.h[i] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(series.P[i] == doctest::Approx(std::exp(2.0 * s.eps.imag() * times[i])).epsilon(1e-10));
  }
}

TEST_CASE("driven survival") {
  const WellParams p = kWell.with_v1(1.5).with_omega(0.7 * 15);
  for (Complex seed : {Complex(3.48, 0.0), Complex(12.974, -0.038)}) {
    const FloquetState s = solved(p, seed, Truncation{2});
    const double period = 2.0 * std::numbers::pi / p.omega;
    std::vector<double> times;
    for (int i = 0; i <= 400; ++i) times.push_back(4.0 * period * i / 400);
    const SurvivalSeries series = survival(s, p, times);
    CHECK(series.period == doctest::Approx(period));
    CHECK(series.P[0] == doctest::Approx(1.0).epsilon(1e-14));

    double hi = 0.0, lo = 1e300;
    for (double h : series.h) {
      hi = std::max(hi, h);
      lo = std::min(lo, h);
    }
    CHECK(hi / lo > 1.0);
    CHECK(hi / lo < 10.0);

    for (std::size_t i = 0; i + 1 < times.size(); ++i) CHECK(series.Pbar[i + 1] <= series.Pbar[i]);
    for (int i = 0; i + 100 < 401; i += 7) CHECK(std::abs(series.h[i + 100] - series.h[i]) < 1e-8);

    // Mass in [0, b] from a fine Simpson rule on the density.
    const double norm0 = trapped(s, p, 0.0);
    for (int i : {37, 150, 333}) {
      CAPTURE(series.P[i] - trapped(s, p, times[i]) / norm0);
      CHECK(series.P[i] == doctest::Approx(trapped(s, p, times[i]) / norm0).epsilon(1e-8));
    }

    // Period average from a dense trapezoid.
    double mean = 0.0;
    const int n = 2000;
    const SurvivalSeries dense = survival(s, p, [&] {
      std::vector<double> t;
      for (int i = 0; i < n; ++i) t.push_back(period * i / n);
      return t;
    }());
    for (double h : dense.h) mean += h / n;
    CHECK(series.h_mean == doctest::Approx(mean).epsilon(1e-12));
  }
}
