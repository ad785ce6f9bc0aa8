#pragma once

#include <vector>

#include "floquet/matching.hpp"
#include "floquet/model.hpp"

namespace floquet {

struct SurvivalSeries {
  std::vector<double> times;
  std::vector<double> P;
  std::vector<double> h;
  std::vector<double> Pbar;
  double h_mean = 1.0;
  double period = 0.0;  // 2 pi / omega, 0 without a drive frequency
};

// |Psi(x, t)|^2 for 0 <= x <= b. The outer region is rejected: Gamow tails
// grow and are not integrable.
double wavefunction_density(const FloquetState& state, const WellParams& params, double x, double t);

// Probability of remaining in [0, b], normalized to 1 at t = 0.
SurvivalSeries survival(const FloquetState& state, const WellParams& params, const std::vector<double>& times);

// Probability mass of |Phi|^2 in [0, b] as a trigonometric polynomial in
// omega t: sum over (l, l') of gram(l, l') exp(i (l - l') omega t).
class TrappedNorm {
 public:
  TrappedNorm(const FloquetState& state, const WellParams& params);

  double at(double t) const;

 private:
  Eigen::MatrixXcd gram_;
  Truncation truncation_;
  double omega_;
};

}  // namespace floquet
