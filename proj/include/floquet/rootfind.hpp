#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "floquet/model.hpp"

namespace floquet {

using ComplexFunction = std::function<Complex(Complex)>;

struct ComplexBox {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  bool contains(Complex z, double margin = 0.0) const;
  // Grown by `fraction` of its size on every side.
  ComplexBox inflated(double fraction) const;
  // Lower-left, lower-right, upper-right, upper-left.
  std::vector<ComplexBox> quadrants() const;
};

struct RootResult {
  ComplexEnergy eps;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct PolishOptions {
  double step_tolerance = 1e-10;
  int max_iterations = 100;
  // Distance of the two auxiliary Muller starting points from the seed;
  // 0 selects 1e-6 * max(1, |seed|).
  double initial_spread = 0.0;
  // Leaving this region aborts the iteration (non-converged result).
  std::optional<ComplexBox> region;
  // Optional acceptance test; when set, `converged` also requires
  // residual(root) < residual_tolerance and RootResult::residual holds it.
  std::function<double(Complex)> residual;
  double residual_tolerance = 1e-8;
};

// Muller iteration followed by one Newton step with a central-difference
// derivative. Never throws on divergence.
RootResult polish(const ComplexFunction& f, Complex seed, const PolishOptions& options = {});

// Branch cut running vertically downward from `origin` (Im <= origin.imag()).
struct BranchCut {
  Complex origin;
};

struct CountOptions {
  int samples_per_edge = 16;
  std::vector<BranchCut> cuts;
  int max_inflations = 5;
};

// Winding number of f around the box boundary (counter-clockwise).
// Throws DomainError when a cut passes through the box interior or its right
// edge, SolverError("boundary_root") when a root on the boundary survives
// max_inflations 1% inflations.
int count_roots_in_box(const ComplexFunction& f, const ComplexBox& box, const CountOptions& options = {});

struct FindOptions {
  CountOptions count;
  PolishOptions polish;
  int max_depth = 12;
  double duplicate_distance = 1e-8;
};

// Roots inside the box: boxes are split along cuts, quadrisected until each
// holds at most one root, then polished from the centre. Throws
// SolverError("lost_root") when a counted root cannot be recovered.
std::vector<RootResult> find_all_in_box(const ComplexFunction& f, const ComplexBox& box,
                                        const FindOptions& options = {});

}  // namespace floquet
