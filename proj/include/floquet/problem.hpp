#pragma once

#include <vector>

#include "floquet/matching.hpp"
#include "floquet/rootfind.hpp"

namespace floquet {

// Quasi-energy condition det M(eps) = 0 for fixed parameters, wired to the
// generic root finder.
class FloquetProblem {
 public:
  FloquetProblem(WellParams params, Truncation truncation, Variant variant = Variant::kBarrierDriven);

  // Truncation from default_truncation(params).
  explicit FloquetProblem(WellParams params, Variant variant = Variant::kBarrierDriven);

  const WellParams& params() const { return params_; }
  Truncation truncation() const { return truncation_; }
  Variant variant() const { return variant_; }

  Complex determinant(ComplexEnergy eps) const;
  double residual(ComplexEnergy eps) const;
  bool accepts(ComplexEnergy eps) const { return residual(eps) < kResidualTolerance; }

  ComplexFunction function() const;

  // k' branch points eps = V0' - n w, n = -N..N, cuts running downward.
  std::vector<BranchCut> cuts() const;

  PolishOptions polish_options() const;

  RootResult polish(ComplexEnergy seed) const;
  RootResult polish(ComplexEnergy seed, PolishOptions options) const;

  std::vector<RootResult> find_all(const ComplexBox& box) const;

  FloquetState state(ComplexEnergy eps) const;

 private:
  WellParams params_;
  Truncation truncation_;
  Variant variant_;
};

}  // namespace floquet
