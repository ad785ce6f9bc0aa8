#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floquet/matching.hpp"
#include "floquet/model.hpp"

namespace floquet {

enum class SweepParameter { kOmega, kV1 };

const char* to_string(SweepParameter parameter);
SweepParameter parse_sweep_parameter(const std::string& text);

WellParams with_parameter(const WellParams& params, SweepParameter parameter, double value);

struct TracePoint {
  double parameter = 0.0;
  ComplexEnergy eps;
  double residual = 0.0;
  int sidebands = 0;
};

struct BranchTrace {
  std::string label;
  SweepParameter parameter = SweepParameter::kOmega;
  std::vector<TracePoint> points;
  // Parameter value where continuation broke down (step underflow).
  std::optional<double> breakdown;

  double start() const { return points.front().parameter; }
  double end() const { return points.back().parameter; }
  // Linear interpolation in the parameter; the value must lie in the trace.
  ComplexEnergy interpolate(double parameter) const;
};

struct StepPolicy {
  SweepParameter parameter = SweepParameter::kOmega;
  Variant variant = Variant::kBarrierDriven;
  double initial_step = 0.0;  // 0: max_step
  double max_step = 0.0;      // 0: range / 199
  // Accepted points always include p_start + k * grid_step (0: no grid).
  double grid_step = 0.0;
  double min_step_fraction = 1e-6;
  // |eps_new - eps_prev| limit in units of V0.
  double jump_threshold = 0.01;
  // Corrector must land within predictor_tolerance * |predicted move| +
  // predictor_floor * V0 of the prediction.
  double predictor_tolerance = 0.25;
  double predictor_floor = 1e-6;
  int easy_steps_before_growth = 4;
  // Fixed sideband count; otherwise default_truncation at every point.
  std::optional<Truncation> truncation;
};

// Predictor-corrector continuation of one quasi-energy branch from a root at
// p_start to p_end. Throws SolverError("seed_not_converged") when the seed
// does not polish to a root at p_start.
BranchTrace trace_branch(const WellParams& params, ComplexEnergy seed, double p_start, double p_end,
                         const StepPolicy& policy, std::string label = {});

enum class CrossingKind { kDirect, kAvoided };

const char* to_string(CrossingKind kind);

struct CrossingEvent {
  CrossingKind kind = CrossingKind::kDirect;
  double parameter_value = 0.0;
  double gap_re = 0.0;
  double gap_im = 0.0;
  std::pair<std::string, std::string> branches;
};

struct CrossingOptions {
  // Closest approach must be below window_fraction * omega.
  double window_fraction = 0.05;
  // DIRECT requires gap_re below direct_threshold * V0.
  double direct_threshold = 1e-4;
};

// Crossings between two traces after reduction of Re(eps_B - eps_A) to a
// common Floquet zone. Throws DomainError for disjoint parameter ranges.
std::vector<CrossingEvent> classify_crossings(const BranchTrace& a, const BranchTrace& b, const WellParams& params,
                                              const CrossingOptions& options = {});

struct BranchSeed {
  std::string label;
  ComplexEnergy eps;
};

struct SweepConfig {
  double p_start = 0.0;
  double p_end = 0.0;
  int grid_points = 200;
  int refinement = 10;  // density factor near events
  StepPolicy policy;
  CrossingOptions crossing;
};

struct SweepResult {
  std::vector<BranchTrace> traces;
  std::vector<CrossingEvent> events;
};

// Traces every seed over the uniform grid, refines around detected events
// and classifies all pairs of traces. Events are ordered by parameter.
SweepResult run_sweep(const WellParams& params, const std::vector<BranchSeed>& seeds, const SweepConfig& config);

// Static levels continued in V1 from 0 to params.v1 at fixed params.omega.
std::vector<BranchSeed> driven_seeds(const WellParams& params, const std::vector<BranchSeed>& static_seeds,
                                     const StepPolicy& policy);

// Labelled static levels ("E0", "E1", ...) of params' undriven well.
std::vector<BranchSeed> static_seeds(const WellParams& params);

struct ThresholdConfig {
  double window_start = 0.0;  // omega window containing one crossing
  double window_end = 0.0;
  double v1_low = 0.0;
  double v1_high = 0.0;
  double resolution = 0.002;  // units of V0
  int window_points = 300;
  StepPolicy policy;
  CrossingOptions crossing;
};

struct ThresholdResult {
  double v1 = 0.0;  // transition amplitude
  CrossingKind low_kind = CrossingKind::kDirect;
  CrossingKind high_kind = CrossingKind::kAvoided;
  std::vector<std::pair<double, CrossingEvent>> probes;  // (V1, event) per evaluation
};

// Kind of the single crossing between the two seeds' branches in the window.
CrossingEvent crossing_in_window(const WellParams& params, const std::vector<BranchSeed>& seeds,
                                 const ThresholdConfig& config);

// Bisection on V1 for the amplitude where the crossing changes kind. Throws
// SolverError("no_transition") when both ends have the same kind.
ThresholdResult threshold_scan(const WellParams& params, const std::vector<BranchSeed>& seeds,
                               const ThresholdConfig& config);

}  // namespace floquet
