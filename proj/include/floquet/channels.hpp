#pragma once

#include <vector>

#include "floquet/model.hpp"

namespace floquet {

// Per-sideband wavenumbers for one candidate quasi-energy. Arrays are
// indexed by slot (truncation.slot(n)).
struct ChannelSet {
  ComplexEnergy eps;
  Truncation truncation;
  std::vector<Complex> k;       // well:    k_n^2  = 2m(eps + n w)
  std::vector<Complex> q;       // barrier: q_l^2  = 2m(V0 - eps - l w)
  std::vector<Complex> kprime;  // outside: k'_n^2 = 2m(eps + n w - V0')
  double alpha = 0.0;

  Complex k_at(int n) const { return k[truncation.slot(n)]; }
  Complex q_at(int l) const { return q[truncation.slot(l)]; }
  Complex kprime_at(int n) const { return kprime[truncation.slot(n)]; }
};

ChannelSet build_channels(const WellParams& params, ComplexEnergy eps, Truncation truncation);

}  // namespace floquet
