// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "floquet/cli.hpp"
#include "floquet/observables.hpp"
#include "floquet/problem.hpp"
#include "floquet/staticwell.hpp"
#include "floquet/sweep.hpp"
#include "oracles.hpp"

using namespace floquet;
namespace fs = std::filesystem;

namespace {

constexpr double kV0 = 15.0;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("floqwell_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string run_cli(cli::Command command, const cli::KeyValues& values) {
  const cli::RunConfig config = cli::parse_config(command, values, true);
  std::ostringstream out;
  cli::run(config, out);
  return out.str();
}

// CSV text to rows of named cells.
std::vector<std::map<std::string, std::string>> read_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::map<std::string, std::string> row;
    for (const std::string& name : header) {
      std::getline(ss, cell, ',');
      row[name] = cell;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::vector<BranchSeed>& static_levels() {
  static const std::vector<BranchSeed> seeds = static_seeds(reference_well());
  return seeds;
}

std::vector<BranchSeed> driven(const WellParams& p, std::optional<Truncation> n = std::nullopt) {
  StepPolicy policy;
  policy.truncation = n;
  return driven_seeds(p, static_levels(), policy);
}

Outcome static_spectrum() {
  const auto start = std::chrono::steady_clock::now();
  const std::string csv = run_cli(cli::Command::kStatic, {});
  const double elapsed = seconds_since(start);
  const auto rows = read_csv(csv);
  if (rows.size() != 2) return {false, "expected 2 levels, got " + std::to_string(rows.size())};
  const double e0 = std::stod(rows[0].at("re_eps_over_v0"));
  const double e1r = std::stod(rows[1].at("re_eps_over_v0"));
  const double e1i = std::stod(rows[1].at("im_eps_over_v0"));
  const bool ok = std::abs(e0 - 0.232123) < 1e-5 && std::abs(e1r - 0.864945) < 1e-5 &&
                  std::abs(e1i + 0.00255261) < 1e-5 && elapsed < 1.0;
  return {ok, "E0/V0=" + num(e0) + " E1/V0=" + num(e1r) + num(e1i) + "i t=" + num(elapsed) + "s"};
}

struct SweepRun {
  std::vector<std::map<std::string, std::string>> rows;
  nlohmann::json events;
  double seconds = 0.0;
};

const SweepRun& reference_sweep() {
  static const SweepRun run = [] {
    SweepRun r;
    const fs::path csv = work_dir() / "sweep.csv";
    const fs::path events = work_dir() / "events.json";
    const auto start = std::chrono::steady_clock::now();
    run_cli(cli::Command::kSweep, {{"v1", "0.1*v0"},
                                   {"omega", "0.2*v0:1.0*v0"},
                                   {"n_sidebands", "2"},
                                   {"grid_points", "200"},
                                   {"output", csv.string()},
                                   {"events_output", events.string()}});
    r.seconds = seconds_since(start);
    r.rows = read_csv(slurp(csv));
    r.events = nlohmann::json::parse(slurp(events));
    return r;
  }();
  return run;
}

// Im(E1 branch) - Im(E0 branch) at omega, interpolated from the sweep CSV.
double im_order(const SweepRun& run, double omega) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& row : run.rows) series[row.at("branch_label")].emplace_back(std::stod(row.at("param")), std::stod(row.at("im_eps")));
  auto at = [&](const std::string& label) {
    const auto& s = series.at(label);
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].first >= omega) {
        const double t = (omega - s[i - 1].first) / (s[i].first - s[i - 1].first);
        return s[i - 1].second + t * (s[i].second - s[i - 1].second);
      }
    return s.back().second;
  };
  return at("E1") - at("E0");
}

Outcome avoided_crossing() {
  const SweepRun& run = reference_sweep();
  int count = 0;
  double where = 0.0;
  for (const auto& e : run.events)
    if (e["kind"] == "AVOIDED") {
      ++count;
      where = e["parameter_value"].get<double>();
    }
  if (count != 1) return {false, std::to_string(count) + " AVOIDED events"};
  const double before = im_order(run, where - 0.03 * kV0);
  const double after = im_order(run, where + 0.03 * kV0);
  const bool interchange = (before < 0.0) != (after < 0.0);
  const bool ok = std::abs(where / kV0 - 0.6328) <= 0.01 && interchange && run.seconds < 30.0;
  return {ok, "omega/V0=" + num(where / kV0) + " dIm " + num(before) + " -> " + num(after) + " t=" + num(run.seconds) + "s"};
}

Outcome direct_crossing() {
  const SweepRun& run = reference_sweep();
  int count = 0;
  double where = 0.0;
  for (const auto& e : run.events) {
    const double w = e["parameter_value"].get<double>();
    if (e["kind"] == "DIRECT" && std::abs(w / kV0 - 0.316) <= 0.02) {
      ++count;
      where = w;
    }
  }
  if (count != 1) return {false, std::to_string(count) + " DIRECT events near 0.316"};
  const double before = im_order(run, where - 0.03 * kV0);
  const double after = im_order(run, where + 0.03 * kV0);
  const bool no_interchange = (before < 0.0) == (after < 0.0);
  return {no_interchange, "omega/V0=" + num(where / kV0) + " dIm " + num(before) + " -> " + num(after)};
}

Outcome amplitude_threshold() {
  const std::string report = run_cli(cli::Command::kThreshold, {{"v1", "0.01*v0:0.1*v0"}, {"omega", "0.55*v0:0.70*v0"}});
  const auto j = nlohmann::json::parse(report);
  const double v1 = j["v1_over_v0"].get<double>();
  return {std::abs(v1 - 0.03) <= 0.01, "V1/V0=" + num(v1)};
}

Outcome destabilization() {
  const WellParams base = reference_well().with_omega(0.45 * kV0);
  const auto weak = driven(base.with_v1(0.1 * kV0));
  const auto strong = driven(base.with_v1(0.2 * kV0));
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < 2; ++i) {
    ok = ok && std::abs(strong[i].eps.imag()) > std::abs(weak[i].eps.imag());
    detail += weak[i].label + " |Im| " + num(std::abs(weak[i].eps.imag()) / kV0) + " -> " +
              num(std::abs(strong[i].eps.imag()) / kV0) + "; ";
  }
  ThresholdConfig window;
  window.window_start = 0.55 * kV0;
  window.window_end = 0.70 * kV0;
  const CrossingEvent g1 = crossing_in_window(reference_well().with_v1(0.1 * kV0), static_levels(), window);
  const CrossingEvent g2 = crossing_in_window(reference_well().with_v1(0.2 * kV0), static_levels(), window);
  ok = ok && g1.kind == CrossingKind::kAvoided && g2.kind == CrossingKind::kAvoided && g2.gap_re > g1.gap_re;
  detail += "gap/V0 " + num(g1.gap_re / kV0) + " -> " + num(g2.gap_re / kV0);
  return {ok, detail};
}

Outcome static_limits() {
  double weak_worst = 0.0, fast_worst = 0.0;
  for (double w : {0.3, 0.7}) {
    const FloquetProblem problem(reference_well().with_v1(1e-6 * kV0).with_omega(w * kV0));
    for (const BranchSeed& s : static_levels()) {
      const RootResult r = problem.polish(s.eps);
      if (!r.converged) return {false, "no root near " + s.label};
      weak_worst = std::max(weak_worst, std::abs(r.eps - s.eps) / kV0);
    }
  }
  const FloquetProblem fast(reference_well().with_v1(0.1 * kV0).with_omega(10.0 * kV0));
  for (const BranchSeed& s : static_levels()) {
    const RootResult r = fast.polish(s.eps);
    if (!r.converged) return {false, "no root near " + s.label + " at omega = 10 V0"};
    fast_worst = std::max(fast_worst, std::abs(r.eps - s.eps) / kV0);
  }
  return {weak_worst < 1e-6 && fast_worst < 1e-3,
          "V1=1e-6V0 max|d|/V0=" + num(weak_worst) + " omega=10V0 max|d|/V0=" + num(fast_worst)};
}

Outcome replication() {
  // Sideband window wide enough that a one-sideband shift stays resolved.
  const Truncation n{8};
  const WellParams start = reference_well().with_v1(0.1 * kV0).with_omega(0.2 * kV0);
  SweepConfig config;
  config.p_start = 0.2 * kV0;
  config.p_end = 1.0 * kV0;
  config.grid_points = 60;
  config.refinement = 1;
  config.policy.truncation = n;
  const SweepResult result = run_sweep(start, driven(start, n), config);
  int points = 0;
  double worst = 0.0, zone_error = 0.0;
  bool shifts = true;
  for (const BranchTrace& t : result.traces)
    for (const TracePoint& p : t.points) {
      ++points;
      const double w = p.parameter;
      const FloquetProblem problem(start.with_omega(w), n);
      const ZoneReduced base = reduce_to_first_zone(p.eps, w);
      for (int s : {-1, 1}) {
        const Complex replica = p.eps + double(s) * w;
        worst = std::max(worst, problem.residual(replica));
        const ZoneReduced z = reduce_to_first_zone(replica, w);
        zone_error = std::max(zone_error, std::abs(z.eps - base.eps));
        shifts = shifts && z.shift == base.shift + s;
      }
    }
  const bool ok = points >= 50 && worst < kResidualTolerance && zone_error < 1e-9 * kV0 && shifts;
  return {ok, std::to_string(points) + " roots, max replica residual " + num(worst) + ", zone spread " + num(zone_error)};
}

Outcome sideband_convergence() {
  double worst = 0.0;
  std::string at;
  for (double v1 : {0.1, 0.2})
    for (double w : {0.2, 0.3, 0.45, 0.6, 0.8, 1.0}) {
      const WellParams p = reference_well().with_v1(v1 * kV0).with_omega(w * kV0);
      const auto seeds = driven(p, Truncation{3});
      for (const BranchSeed& s : seeds) {
        const RootResult n3 = FloquetProblem(p, Truncation{3}).polish(s.eps);
        const RootResult n2 = FloquetProblem(p, Truncation{2}).polish(n3.eps);
        if (!n2.converged || !n3.converged) return {false, "polish failed at V1/V0=" + num(v1) + " omega/V0=" + num(w)};
        const double d = std::abs(n2.eps - n3.eps) / kV0;
        if (d > worst) {
          worst = d;
          at = s.label + " V1/V0=" + num(v1) + " omega/V0=" + num(w);
        }
      }
    }
  // omega = V1/4: reported only.
  std::string below = "n/a";
  try {
    const WellParams p = reference_well().with_v1(0.2 * kV0).with_omega(0.05 * kV0);
    const RootResult n3 = FloquetProblem(p, Truncation{3}).polish(static_levels()[0].eps);
    const RootResult n2 = FloquetProblem(p, Truncation{2}).polish(n3.eps);
    if (n2.converged && n3.converged) below = num(std::abs(n2.eps - n3.eps) / kV0);
  } catch (const Error&) {
  }
  return {worst < 1e-6, "max|N2-N3|/V0=" + num(worst) + " (" + at + "); omega=V1/4 E0 spread " + below};
}

Outcome variant_equivalence() {
  const std::vector<std::pair<double, double>> pairs = {{0.2, 0.05}, {0.3, 0.1}, {0.45, 0.1}, {0.6, 0.1}, {0.7, 0.1},
                                                        {0.9, 0.1},  {0.45, 0.2}, {0.7, 0.2}, {1.0, 0.2}, {0.5, 0.15}};
  double worst = 0.0;
  for (auto [w, v1] : pairs) {
    const WellParams p = reference_well().with_v1(v1 * kV0).with_omega(w * kV0);
    for (const BranchSeed& s : driven(p)) {
      const RootResult barrier = FloquetProblem(p, Variant::kBarrierDriven).polish(s.eps);
      const RootResult bottom = FloquetProblem(p, Variant::kBottomDriven).polish(s.eps);
      if (!barrier.converged || !bottom.converged) return {false, "polish failed at omega/V0=" + num(w)};
      worst = std::max(worst, std::abs(barrier.eps - bottom.eps) / kV0);
    }
  }
  return {worst < 1e-8, "10 pairs, max|barrier-bottom|/V0=" + num(worst)};
}

Outcome survival_properties() {
  double p0 = 0.0, periodic = 0.0, exponential = 0.0, pbar = 0.0;
  // Static resonance, with and without idle sidebands.
  for (auto [omega, n] : {std::pair{0.0, 0}, std::pair{0.45 * kV0, 2}}) {
    const WellParams p = reference_well().with_omega(omega);
    const FloquetProblem problem(p, Truncation{n});
    const FloquetState s = problem.state(problem.polish(static_levels()[1].eps).eps);
    std::vector<double> times;
    for (int i = 0; i <= 200; ++i) times.push_back(0.05 * i);
    const SurvivalSeries series = survival(s, p, times);
    p0 = std::max(p0, std::abs(series.P[0] - 1.0));
    for (std::size_t i = 0; i < times.size(); ++i)
      exponential = std::max(exponential, std::abs(series.P[i] - std::exp(2.0 * s.eps.imag() * times[i])));
  }
  const WellParams p = reference_well().with_v1(0.1 * kV0).with_omega(0.45 * kV0);
  const double period = 2.0 * std::numbers::pi / p.omega;
  for (const BranchSeed& seed : driven(p)) {
    const FloquetProblem problem(p);
    const FloquetState s = problem.state(problem.polish(seed.eps).eps);
    std::vector<double> times, shifted, cycle;
    for (int i = 0; i < 300; ++i) {
      times.push_back(0.037 * i);
      shifted.push_back(0.037 * i + period);
    }
    for (int i = 0; i < 128; ++i) cycle.push_back(period * i / 128);
    const SurvivalSeries a = survival(s, p, times);
    const SurvivalSeries b = survival(s, p, shifted);
    const SurvivalSeries c = survival(s, p, cycle);
    double mean = 0.0;
    for (double h : c.h) mean += h / 128;
    p0 = std::max(p0, std::abs(a.P[0] - 1.0));
    for (std::size_t i = 0; i < times.size(); ++i) {
      periodic = std::max(periodic, std::abs(a.h[i] - b.h[i]));
      pbar = std::max(pbar, std::abs(a.Pbar[i] - std::exp(2.0 * s.eps.imag() * times[i]) * mean));
    }
  }
  const bool ok = p0 < 1e-12 && periodic < 1e-8 && exponential < 1e-10 && pbar < 1e-12;
  return {ok, "|P(0)-1|=" + num(p0) + " |h(t+T)-h(t)|=" + num(periodic) + " static|P-exp|=" + num(exponential) +
                  " |Pbar-exp*<h>|=" + num(pbar)};
}

Outcome root_finder_oracle() {
  const WellParams p = reference_well();
  const FloquetProblem problem(p, Truncation{0});
  const auto bisected = oracle::static_bound_states(p, 2000);
  const auto found = problem.find_all({1e-3 * kV0, p.v0_prime - 1e-3 * kV0, -0.01 * kV0, 0.01 * kV0});
  if (found.size() != bisected.size()) {
    return {false, "contour found " + std::to_string(found.size()) + " bound states, bisection " + std::to_string(bisected.size())};
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < found.size(); ++i) worst = std::max(worst, std::abs(found[i].eps - bisected[i]));
  CountOptions count;
  count.cuts = problem.cuts();
  const int resonances = count_roots_in_box(problem.function(), {p.v0_prime, p.v0, -0.02 * kV0, 0.0}, count);
  return {worst < 1e-10 && resonances == 1,
          std::to_string(found.size()) + " bound, max|contour-bisection|=" + num(worst) + ", resonances in box " +
              std::to_string(resonances)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"static spectrum", static_spectrum},
      {"avoided crossing", avoided_crossing},
      {"direct crossing", direct_crossing},
      {"amplitude threshold", amplitude_threshold},
      {"destabilization and repulsion", destabilization},
      {"static and high-frequency limits", static_limits},
      {"branch replication", replication},
      {"sideband convergence", sideband_convergence},
      {"variant equivalence", variant_equivalence},
      {"survival properties", survival_properties},
      {"root finder against bisection", root_finder_oracle},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(work_dir(), ec);
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
