#include "floquet/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "floquet/error.hpp"
#include "floquet/problem.hpp"
#include "floquet/staticwell.hpp"

namespace floquet {

namespace {

FloquetProblem problem_at(const WellParams& params, const StepPolicy& policy, double value) {
  const WellParams p = with_parameter(params, policy.parameter, value);
  return FloquetProblem(p, policy.truncation.value_or(default_truncation(p)), policy.variant);
}

// d eps / d p from the implicit function theorem on det M(eps, p) = 0.
ComplexEnergy tangent(const WellParams& params, const StepPolicy& policy, double p, ComplexEnergy eps, double dir) {
  const double dp = 1e-6 * std::max(1.0, std::abs(p)) * dir;
  const double de = 1e-7 * std::max(1.0, std::abs(eps));
  const FloquetProblem here = problem_at(params, policy, p);
  const Complex d_eps = (here.determinant(eps + de) - here.determinant(eps - de)) / (2.0 * de);
  const Complex d_par = (problem_at(params, policy, p + dp).determinant(eps) - here.determinant(eps)) / dp;
  if (d_eps == 0.0 || !std::isfinite(std::abs(d_par / d_eps))) return 0.0;
  return -d_par / d_eps;
}

double omega_at(const WellParams& params, SweepParameter parameter, double value) {
  return parameter == SweepParameter::kOmega ? value : params.omega;
}

std::vector<TracePoint> ascending(const BranchTrace& trace) {
  std::vector<TracePoint> pts = trace.points;
  if (pts.size() > 1 && pts.front().parameter > pts.back().parameter) std::reverse(pts.begin(), pts.end());
  return pts;
}

ComplexEnergy interpolate_sorted(const std::vector<TracePoint>& pts, double p) {
  auto it = std::lower_bound(pts.begin(), pts.end(), p,
                             [](const TracePoint& tp, double value) { return tp.parameter < value; });
  if (it == pts.begin()) return pts.front().eps;
  if (it == pts.end()) return pts.back().eps;
  const TracePoint& hi = *it;
  const TracePoint& lo = *(it - 1);
  if (hi.parameter == lo.parameter) return hi.eps;
  const double t = (p - lo.parameter) / (hi.parameter - lo.parameter);
  return lo.eps + t * (hi.eps - lo.eps);
}

// Re-traces both branches of `event` at a finer step and splices the result
// into the traces.
void refine_branch(const WellParams& params, BranchTrace& trace, double center, double half_width,
                   const StepPolicy& policy, int factor) {
  auto& pts = trace.points;
  if (pts.size() < 3) return;
  const double dir = pts.back().parameter > pts.front().parameter ? 1.0 : -1.0;
  const double from = center - dir * half_width;
  const double to = center + dir * half_width;
  std::size_t i0 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (dir * (pts[i].parameter - from) <= 0.0) i0 = i;
  std::size_t i1 = pts.size() - 1;
  for (std::size_t i = pts.size(); i-- > 0;)
    if (dir * (pts[i].parameter - to) >= 0.0) i1 = i;
  if (i1 <= i0 + 1) return;

  StepPolicy fine = policy;
  fine.max_step = policy.max_step / factor;
  fine.initial_step = fine.max_step;
  fine.grid_step = policy.grid_step > 0.0 ? policy.grid_step / factor : 0.0;
  BranchTrace local;
  try {
    local = trace_branch(params, pts[i0].eps, pts[i0].parameter, pts[i1].parameter, fine, trace.label);
  } catch (const SolverError&) {
    return;
  }
  if (local.breakdown || local.points.size() < 2) return;
  // The refined end must land on the same branch as the coarse trace.
  if (std::abs(local.points.back().eps - pts[i1].eps) > 1e-6 * std::max(1.0, std::abs(pts[i1].eps))) return;
  std::vector<TracePoint> merged(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i0) + 1);
  merged.insert(merged.end(), local.points.begin() + 1, local.points.end() - 1);
  merged.insert(merged.end(), pts.begin() + static_cast<std::ptrdiff_t>(i1), pts.end());
  pts = std::move(merged);
}

std::vector<CrossingEvent> classify_all(const std::vector<BranchTrace>& traces, const WellParams& params,
                                        const CrossingOptions& options) {
  std::vector<CrossingEvent> events;
  for (std::size_t i = 0; i < traces.size(); ++i)
    for (std::size_t j = i + 1; j < traces.size(); ++j) {
      if (traces[i].points.size() < 2 || traces[j].points.size() < 2) continue;
      const auto found = classify_crossings(traces[i], traces[j], params, options);
      events.insert(events.end(), found.begin(), found.end());
    }
  std::stable_sort(events.begin(), events.end(),
                   [](const CrossingEvent& x, const CrossingEvent& y) { return x.parameter_value < y.parameter_value; });
  return events;
}

}  // namespace

const char* to_string(SweepParameter parameter) { return parameter == SweepParameter::kOmega ? "omega" : "v1"; }

SweepParameter parse_sweep_parameter(const std::string& text) {
  if (text == "omega") return SweepParameter::kOmega;
  if (text == "v1") return SweepParameter::kV1;
  throw DomainError("sweep parameter must be 'omega' or 'v1', got '" + text + "'");
}

const char* to_string(CrossingKind kind) { return kind == CrossingKind::kDirect ? "DIRECT" : "AVOIDED"; }

WellParams with_parameter(const WellParams& params, SweepParameter parameter, double value) {
  return parameter == SweepParameter::kOmega ? params.with_omega(value) : params.with_v1(value);
}

ComplexEnergy BranchTrace::interpolate(double parameter) const { return interpolate_sorted(ascending(*this), parameter); }

BranchTrace trace_branch(const WellParams& params, ComplexEnergy seed, double p_start, double p_end,
                         const StepPolicy& policy, std::string label) {
  BranchTrace trace;
  trace.label = std::move(label);
  trace.parameter = policy.parameter;

  const FloquetProblem first = problem_at(params, policy, p_start);
  const RootResult start = first.polish(seed);
  if (!start.converged || std::abs(start.eps - seed) > policy.jump_threshold * std::abs(params.v0)) {
    std::ostringstream os;
    os.precision(17);
    os << "trace_branch: seed (" << seed.real() << ", " << seed.imag() << ") is not a root at parameter " << p_start
       << " (residual " << start.residual << ")";
    throw SolverError("seed_not_converged", os.str());
  }
  trace.points.push_back({p_start, start.eps, start.residual, first.truncation().n});

  const double range = std::abs(p_end - p_start);
  if (range == 0.0) return trace;
  const double dir = p_end > p_start ? 1.0 : -1.0;
  const double max_step = policy.max_step > 0.0 ? policy.max_step : range / 199.0;
  double h = policy.initial_step > 0.0 ? std::min(policy.initial_step, max_step) : max_step;
  const double scale = std::abs(params.v0);
  const double jump = policy.jump_threshold * scale;
  const double floor = policy.predictor_floor * scale;
  int easy = 0;
  double p = p_start;

  while (dir * (p_end - p) > 1e-12 * range) {
    double step = std::min(h, std::abs(p_end - p));
    if (policy.grid_step > 0.0) {
      const double done = std::abs(p - p_start) / policy.grid_step;
      const double next = (std::floor(done + 1e-9) + 1.0) * policy.grid_step;
      step = std::min(step, next - std::abs(p - p_start));
    }
    double p_new = p + dir * step;
    if (std::abs(p_end - p_new) < 1e-12 * range) p_new = p_end;

    const TracePoint& last = trace.points.back();
    ComplexEnergy predicted;
    if (trace.points.size() >= 2) {
      const TracePoint& before = trace.points[trace.points.size() - 2];
      predicted = last.eps + (last.eps - before.eps) * ((p_new - last.parameter) / (last.parameter - before.parameter));
    } else {
      predicted = last.eps + tangent(params, policy, last.parameter, last.eps, dir) * (p_new - last.parameter);
    }

    const FloquetProblem problem = problem_at(params, policy, p_new);
    const RootResult r = problem.polish(predicted);
    const double predicted_move = std::abs(predicted - last.eps);
    const bool accepted = r.converged && std::abs(r.eps - predicted) <= policy.predictor_tolerance * predicted_move + floor &&
                          std::abs(r.eps - last.eps) < jump && r.eps.imag() <= 1e-12;
    if (accepted) {
      trace.points.push_back({p_new, r.eps, r.residual, problem.truncation().n});
      p = p_new;
      if (++easy >= policy.easy_steps_before_growth) {
        h = std::min(2.0 * h, max_step);
        easy = 0;
      }
    } else {
      h = 0.5 * step;
      easy = 0;
      if (h < policy.min_step_fraction * range) {
        trace.breakdown = p;
        break;
      }
    }
  }
  return trace;
}

std::vector<CrossingEvent> classify_crossings(const BranchTrace& a, const BranchTrace& b, const WellParams& params,
                                              const CrossingOptions& options) {
  if (a.points.empty() || b.points.empty()) throw DomainError("classify_crossings: empty trace");
  const std::vector<TracePoint> pa = ascending(a);
  const std::vector<TracePoint> pb = ascending(b);
  const double lo = std::max(pa.front().parameter, pb.front().parameter);
  const double hi = std::min(pa.back().parameter, pb.back().parameter);
  if (!(lo < hi)) throw DomainError("classify_crossings: traces '" + a.label + "' and '" + b.label + "' share no parameter range");

  std::vector<double> grid;
  for (const auto* pts : {&pa, &pb})
    for (const TracePoint& tp : *pts)
      if (tp.parameter >= lo && tp.parameter <= hi) grid.push_back(tp.parameter);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::size_t n = grid.size();
  std::vector<double> gap(n), im_diff(n), window(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexEnergy ea = interpolate_sorted(pa, grid[i]);
    const ComplexEnergy eb = interpolate_sorted(pb, grid[i]);
    const double w = omega_at(params, a.parameter, grid[i]);
    gap[i] = reduce_symmetric(eb.real() - ea.real(), w);
    im_diff[i] = eb.imag() - ea.imag();
    window[i] = options.window_fraction * w;
  }
  const double direct_limit = options.direct_threshold * std::abs(params.v0);

  // Basin around a closest approach: walk outward while |gap| grows and
  // stays inside the detection window.
  auto basin_edge = [&](std::size_t start, int step) {
    std::size_t j = start;
    while (true) {
      const std::ptrdiff_t next = static_cast<std::ptrdiff_t>(j) + step;
      if (next < 0 || next >= static_cast<std::ptrdiff_t>(n)) break;
      if (std::abs(gap[next]) < std::abs(gap[j]) || std::abs(gap[j]) >= window[j]) break;
      j = static_cast<std::size_t>(next);
    }
    return j;
  };

  auto make_event = [&](double location, double gap_re, std::size_t left, std::size_t right) {
    const std::size_t l = basin_edge(left, -1);
    const std::size_t r = basin_edge(right, +1);
    const bool interchange = im_diff[l] != 0.0 && im_diff[r] != 0.0 && (im_diff[l] > 0.0) != (im_diff[r] > 0.0);
    const ComplexEnergy ea = interpolate_sorted(pa, location);
    const ComplexEnergy eb = interpolate_sorted(pb, location);
    std::optional<CrossingEvent> event;
    if (interchange || gap_re < direct_limit) {
      event = CrossingEvent{interchange ? CrossingKind::kAvoided : CrossingKind::kDirect, location, gap_re,
                            std::abs(eb.imag() - ea.imag()), {a.label, b.label}};
    }
    return event;
  };

  std::vector<CrossingEvent> events;
  std::vector<bool> used(n, false);
  // Sign changes of the reduced gap (not zone-edge wraps).
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double g0 = gap[i], g1 = gap[i + 1];
    if (std::abs(g0) >= window[i] || std::abs(g1) >= window[i + 1]) continue;
    if (!((g0 <= 0.0 && g1 > 0.0) || (g0 >= 0.0 && g1 < 0.0))) continue;
    if (used[i]) continue;
    const double t = g0 / (g0 - g1);
    const double location = grid[i] + t * (grid[i + 1] - grid[i]);
    used[i] = used[i + 1] = true;
    if (auto e = make_event(location, 0.0, i, i + 1)) events.push_back(*e);
  }
  // Interior minima of |gap| without a sign change.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (used[i]) continue;
    const double g = std::abs(gap[i]);
    if (g >= window[i] || g > std::abs(gap[i - 1]) || g > std::abs(gap[i + 1])) continue;
    if ((gap[i - 1] > 0.0) != (gap[i] > 0.0) || (gap[i + 1] > 0.0) != (gap[i] > 0.0)) continue;
    // Parabolic vertex through the three samples.
    double location = grid[i];
    double gap_re = g;
    const double x0 = grid[i - 1], x1 = grid[i], x2 = grid[i + 1];
    const double y0 = std::abs(gap[i - 1]), y1 = g, y2 = std::abs(gap[i + 1]);
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if (denom != 0.0) {
      const double A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
      const double B = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
      const double C = y1 - A * x1 * x1 - B * x1;
      if (A > 0.0) {
        const double xv = -B / (2.0 * A);
        if (xv > x0 && xv < x2) {
          location = xv;
          gap_re = std::max(0.0, A * xv * xv + B * xv + C);
        }
      }
    }
    used[i] = true;
    if (auto e = make_event(location, gap_re, i, i)) events.push_back(*e);
  }
  std::sort(events.begin(), events.end(),
            [](const CrossingEvent& x, const CrossingEvent& y) { return x.parameter_value < y.parameter_value; });
  return events;
}

SweepResult run_sweep(const WellParams& params, const std::vector<BranchSeed>& seeds, const SweepConfig& config) {
  if (config.grid_points < 2) throw DomainError("run_sweep: grid_points must be >= 2");
  if (config.p_start == config.p_end) throw DomainError("run_sweep: empty sweep range");
  const double grid = std::abs(config.p_end - config.p_start) / (config.grid_points - 1);
  StepPolicy policy = config.policy;
  policy.grid_step = grid;
  if (policy.max_step <= 0.0) policy.max_step = grid;

  SweepResult result;
  for (const BranchSeed& seed : seeds)
    result.traces.push_back(trace_branch(params, seed.eps, config.p_start, config.p_end, policy, seed.label));

  std::vector<CrossingEvent> events = classify_all(result.traces, params, config.crossing);
  if (config.refinement > 1 && !events.empty()) {
    for (const CrossingEvent& e : events)
      for (BranchTrace& trace : result.traces)
        if (trace.label == e.branches.first || trace.label == e.branches.second)
          refine_branch(params, trace, e.parameter_value, 2.0 * grid, policy, config.refinement);
    events = classify_all(result.traces, params, config.crossing);
  }
  result.events = std::move(events);
  return result;
}

std::vector<BranchSeed> static_seeds(const WellParams& params) {
  const StaticSpectrum spectrum = solve_static(params);
  std::vector<BranchSeed> out;
  int index = 0;
  for (const ComplexEnergy& level : spectrum.levels()) out.push_back({"E" + std::to_string(index++), level});
  return out;
}

std::vector<BranchSeed> driven_seeds(const WellParams& params, const std::vector<BranchSeed>& seeds,
                                     const StepPolicy& policy) {
  if (params.v1 == 0.0) return seeds;
  StepPolicy continuation = policy;
  continuation.parameter = SweepParameter::kV1;
  continuation.grid_step = 0.0;
  continuation.max_step = params.v1 / 20.0;
  continuation.initial_step = continuation.max_step;
  std::vector<BranchSeed> out;
  for (const BranchSeed& seed : seeds) {
    const BranchTrace trace = trace_branch(params.with_v1(0.0), seed.eps, 0.0, params.v1, continuation, seed.label);
    if (trace.breakdown) {
      throw SolverError("continuation_breakdown",
                        "driven_seeds: continuation of " + seed.label + " in V1 broke down at V1 = " +
                            std::to_string(*trace.breakdown));
    }
    out.push_back({seed.label, trace.points.back().eps});
  }
  return out;
}

CrossingEvent crossing_in_window(const WellParams& params, const std::vector<BranchSeed>& seeds,
                                 const ThresholdConfig& config) {
  const WellParams start = params.with_omega(config.window_start);
  StepPolicy policy = config.policy;
  policy.parameter = SweepParameter::kOmega;
  const std::vector<BranchSeed> driven = driven_seeds(start, seeds, policy);
  SweepConfig sweep;
  sweep.p_start = config.window_start;
  sweep.p_end = config.window_end;
  sweep.grid_points = config.window_points;
  sweep.policy = policy;
  sweep.crossing = config.crossing;
  const SweepResult result = run_sweep(start, driven, sweep);
  if (result.events.empty()) {
    std::ostringstream os;
    os << "crossing_in_window: no crossing in omega window [" << config.window_start << ", " << config.window_end
       << "] at V1 = " << params.v1;
    throw SolverError("no_crossing", os.str());
  }
  return *std::min_element(result.events.begin(), result.events.end(),
                           [](const CrossingEvent& x, const CrossingEvent& y) { return x.gap_re < y.gap_re; });
}

ThresholdResult threshold_scan(const WellParams& params, const std::vector<BranchSeed>& seeds,
                               const ThresholdConfig& config) {
  if (seeds.size() != 2) throw DomainError("threshold_scan: exactly two branch seeds required");
  ThresholdResult result;
  auto probe = [&](double v1) {
    const CrossingEvent e = crossing_in_window(params.with_v1(v1), seeds, config);
    result.probes.emplace_back(v1, e);
    return e.kind;
  };
  double lo = config.v1_low;
  double hi = config.v1_high;
  result.low_kind = probe(lo);
  result.high_kind = probe(hi);
  if (result.low_kind == result.high_kind) {
    throw SolverError("no_transition", std::string("threshold_scan: both endpoints ") + to_string(result.low_kind) +
                                           " (low " + to_string(result.low_kind) + ", high " +
                                           to_string(result.high_kind) + ")");
  }
  const double resolution = config.resolution * std::abs(params.v0);
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) == result.low_kind)
      lo = mid;
    else
      hi = mid;
  }
  result.v1 = 0.5 * (lo + hi);
  return result;
}

}  // namespace floquet
