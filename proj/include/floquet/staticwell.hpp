#pragma once

#include <optional>
#include <vector>

#include "floquet/model.hpp"
#include "floquet/rootfind.hpp"

namespace floquet {

struct StaticSpectrum {
  std::vector<double> bound;               // increasing, each < V0'
  std::vector<ComplexEnergy> resonances;   // Re in (V0', V0), Im < 0, increasing Re

  // Bound states followed by resonances.
  std::vector<ComplexEnergy> levels() const;
};

struct StaticOptions {
  int scan_points = 2000;
  double bisection_tolerance = 1e-12;
  // Defaults to [V0', V0] x [-0.1 (V0 - V0'), 0].
  std::optional<ComplexBox> search_box;
};

// Spectrum of the undriven well (V1 ignored).
StaticSpectrum solve_static(const WellParams& params, const StaticOptions& options = {});

// Real-valued static quantization function on (0, V0'): Re det M(E) at N = 0.
double static_condition(const WellParams& params, double energy);

}  // namespace floquet
