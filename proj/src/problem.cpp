#include "floquet/problem.hpp"

namespace floquet {

FloquetProblem::FloquetProblem(WellParams params, Truncation truncation, Variant variant)
    : params_(params), truncation_(truncation), variant_(variant) {
  params_.validate();
}

FloquetProblem::FloquetProblem(WellParams params, Variant variant)
    : FloquetProblem(params, default_truncation(params), variant) {}

Complex FloquetProblem::determinant(ComplexEnergy eps) const {
  return matching_determinant(params_, eps, truncation_, variant_);
}

double FloquetProblem::residual(ComplexEnergy eps) const {
  return matching_residual(params_, eps, truncation_, variant_);
}

ComplexFunction FloquetProblem::function() const {
  return [self = *this](Complex eps) { return self.determinant(eps); };
}

std::vector<BranchCut> FloquetProblem::cuts() const {
  std::vector<BranchCut> out;
  const double w = params_.omega;
  for (int n = -truncation_.n; n <= truncation_.n; ++n) {
    const BranchCut cut{Complex(params_.v0_prime - n * w, 0.0)};
    bool seen = false;
    for (const BranchCut& c : out) seen = seen || c.origin == cut.origin;
    if (!seen) out.push_back(cut);
  }
  return out;
}

PolishOptions FloquetProblem::polish_options() const {
  PolishOptions options;
  options.residual = [self = *this](Complex eps) { return self.residual(eps); };
  options.residual_tolerance = kResidualTolerance;
  return options;
}

RootResult FloquetProblem::polish(ComplexEnergy seed) const { return polish(seed, polish_options()); }

RootResult FloquetProblem::polish(ComplexEnergy seed, PolishOptions options) const {
  if (!options.residual) {
    options.residual = polish_options().residual;
    options.residual_tolerance = kResidualTolerance;
  }
  return floquet::polish(function(), seed, options);
}

std::vector<RootResult> FloquetProblem::find_all(const ComplexBox& box) const {
  FindOptions options;
  options.count.cuts = cuts();
  options.polish = polish_options();
  return find_all_in_box(function(), box, options);
}

FloquetState FloquetProblem::state(ComplexEnergy eps) const { return null_state(params_, eps, truncation_, variant_); }

}  // namespace floquet
