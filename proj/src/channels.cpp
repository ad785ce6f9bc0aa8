#include "floquet/channels.hpp"

#include "floquet/special.hpp"

namespace floquet {

ChannelSet build_channels(const WellParams& params, ComplexEnergy eps, Truncation truncation) {
  ChannelSet set;
  set.eps = eps;
  set.truncation = truncation;
  set.alpha = params.is_static() ? 0.0 : alpha(params);
  const int count = truncation.channels();
  set.k.resize(count);
  set.q.resize(count);
  set.kprime.resize(count);
  const double two_m = 2.0 * params.mass;
  const double w = params.omega;
  for (int slot = 0; slot < count; ++slot) {
    const double shift = truncation.index(slot) * w;
    const Complex energy = eps + shift;
    set.k[slot] = branch_sqrt(two_m * energy, BranchPolicy::kOutgoingRight);
    set.q[slot] = branch_sqrt(two_m * (params.v0 - energy), BranchPolicy::kPrincipal);
    set.kprime[slot] = branch_sqrt(two_m * (energy - params.v0_prime), BranchPolicy::kOutgoingRight);
  }
  return set;
}

}  // namespace floquet
