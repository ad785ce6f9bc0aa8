#include "floquet/observables.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "floquet/error.hpp"
#include "floquet/special.hpp"

namespace floquet {

namespace {

// Channel functions g_n(x), |n| <= N, with Phi(x, t) = sum_n g_n(x) exp(-i n w t).
// The dressed region carries sum_l J_{n-l}(alpha) f_l(x) cut at the same N as
// the matching, so every channel is continuous at x = a.
std::vector<Complex> channel_functions(const FloquetState& state, const WellParams& params, const ChannelSet& ch,
                                       const BesselTable& bessel, double x) {
  const int m = state.truncation.channels();
  const bool in_well = x <= params.a;
  std::vector<Complex> bare(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) {
    if (in_well) {
      const Complex k = ch.k[s];
      bare[s] = state.amplitude[s] * (k == 0.0 ? Complex(x) : std::sin(k * x) / k);
    } else {
      bare[s] = state.barrier[s].value(x, params.a, params.b);
    }
  }
  const bool dressed = in_well == (state.variant == Variant::kBottomDriven);
  if (!dressed) return bare;
  std::vector<Complex> out(static_cast<std::size_t>(m), Complex(0.0));
  for (int n = 0; n < m; ++n)
    for (int l = 0; l < m; ++l) out[n] += bessel.at(n - l) * bare[l];
  return out;
}

void check_position(const WellParams& params, double x) {
  if (!(x >= 0.0 && x <= params.b)) {
    std::ostringstream os;
    os << "wavefunction_density: x = " << x << " outside [0, " << params.b << "]";
    throw DomainError(os.str());
  }
}

}  // namespace

double wavefunction_density(const FloquetState& state, const WellParams& params, double x, double t) {
  check_position(params, x);
  const ChannelSet ch = build_channels(params, state.eps, state.truncation);
  const BesselTable bessel(2 * state.truncation.n, ch.alpha);
  const std::vector<Complex> f = channel_functions(state, params, ch, bessel, x);
  Complex phi = 0.0;
  for (int s = 0; s < state.truncation.channels(); ++s)
    phi += f[s] * std::exp(Complex(0.0, -state.truncation.index(s) * params.omega * t));
  return std::exp(2.0 * state.eps.imag() * t) * std::norm(phi);
}

TrappedNorm::TrappedNorm(const FloquetState& state, const WellParams& params)
    : truncation_(state.truncation), omega_(params.omega) {
  using Rule = boost::math::quadrature::gauss<double, 64>;
  const int m = state.truncation.channels();
  const ChannelSet ch = build_channels(params, state.eps, state.truncation);
  const BesselTable bessel(2 * state.truncation.n, ch.alpha);
  gram_ = Eigen::MatrixXcd::Zero(m, m);
  auto integrate = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const auto& nodes = Rule::abscissa();
    const auto& weights = Rule::weights();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      // Boost stores the nonnegative half of the symmetric rule.
      const int signs = nodes[i] == 0.0 ? 1 : 2;
      for (int j = 0; j < signs; ++j) {
        const double x = mid + (j == 0 ? 1.0 : -1.0) * half * nodes[i];
        const std::vector<Complex> f = channel_functions(state, params, ch, bessel, x);
        const double w = half * weights[i];
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < m; ++c) gram_(r, c) += w * std::conj(f[r]) * f[c];
      }
    }
  };
  integrate(0.0, params.a);
  integrate(params.a, params.b);
}

double TrappedNorm::at(double t) const {
  const int m = truncation_.channels();
  double sum = 0.0;
  for (int r = 0; r < m; ++r) {
    sum += gram_(r, r).real();
    for (int c = r + 1; c < m; ++c) {
      const double phase = (truncation_.index(r) - truncation_.index(c)) * omega_ * t;
      sum += 2.0 * (gram_(r, c) * std::exp(Complex(0.0, phase))).real();
    }
  }
  return sum;
}

SurvivalSeries survival(const FloquetState& state, const WellParams& params, const std::vector<double>& times) {
  const TrappedNorm norm(state, params);
  const double n0 = norm.at(0.0);
  const double decay = 2.0 * state.eps.imag();

  SurvivalSeries out;
  out.times = times;
  if (params.omega > 0.0) {
    out.period = 2.0 * std::numbers::pi / params.omega;
    constexpr int kSamples = 128;
    double acc = 0.0;
    for (int i = 0; i < kSamples; ++i) acc += norm.at(out.period * i / kSamples);
    out.h_mean = acc / kSamples / n0;
  }
  for (double t : times) {
    const double h = norm.at(t) / n0;
    const double envelope = std::exp(decay * t);
    out.h.push_back(h);
    out.P.push_back(envelope * h);
    out.Pbar.push_back(envelope * out.h_mean);
  }
  return out;
}

}  // namespace floquet
