#include "floquet/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <sstream>

#include "floquet/observables.hpp"
#include "floquet/problem.hpp"
#include "floquet/staticwell.hpp"

namespace floquet::cli {

namespace {

using Json = nlohmann::ordered_json;

enum class KeyType { kReal, kEnergy, kEnergyOrRange, kInt, kText };

struct KeySpec {
  const char* name;
  KeyType type;
  const char* help;
};

// v0 itself is the unit for the `*v0` suffix, so it takes a plain number.
const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"a", KeyType::kReal, "well width"},
      {"b", KeyType::kReal, "outer edge of the barrier"},
      {"v0", KeyType::kReal, "barrier height"},
      {"v0_prime", KeyType::kEnergy, "outer potential"},
      {"v1", KeyType::kEnergyOrRange, "drive amplitude (lo:hi for v1 sweeps and threshold)"},
      {"omega", KeyType::kEnergyOrRange, "drive frequency (lo:hi for omega sweeps and threshold window)"},
      {"mass", KeyType::kReal, "particle mass"},
      {"n_sidebands", KeyType::kInt, "sideband truncation N (default max(2, ceil(v1/omega)+1))"},
      {"variant", KeyType::kText, "barrier | bottom"},
      {"sweep_parameter", KeyType::kText, "omega | v1"},
      {"grid_points", KeyType::kInt, "sweep grid points"},
      {"refinement", KeyType::kInt, "grid refinement factor near crossings"},
      {"seeds_file", KeyType::kText, "spectrum CSV used as branch seeds"},
      {"resolution", KeyType::kEnergy, "threshold bisection resolution"},
      {"window_points", KeyType::kInt, "grid points of the threshold frequency window"},
      {"seed_re", KeyType::kEnergy, "root seed, real part"},
      {"seed_im", KeyType::kEnergy, "root seed, imaginary part"},
      {"t_max", KeyType::kReal, "survival end time"},
      {"t_points", KeyType::kInt, "survival samples"},
      {"output", KeyType::kText, "output path, - for stdout"},
      {"events_output", KeyType::kText, "crossing events JSON path"},
  };
  return specs;
}

const KeySpec* find_key(const std::string& name) {
  for (const KeySpec& spec : key_specs())
    if (name == spec.name) return &spec;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

[[noreturn]] void invalid(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("invalid value for key '" + key + "': '" + value + "' (expected " + expected + ")");
}

// A number, optionally `<number>*v0`. Returns the number and whether it is
// in units of v0.
std::pair<double, bool> parse_scalar(const std::string& key, const std::string& raw, bool allow_v0) {
  std::string text = trim(raw);
  bool scaled = false;
  const auto star = text.find('*');
  if (star != std::string::npos) {
    if (!allow_v0 || lower(trim(text.substr(star + 1))) != "v0") invalid(key, raw, allow_v0 ? "a number or <number>*v0" : "a number");
    text = trim(text.substr(0, star));
    scaled = true;
  }
  if (text.empty()) invalid(key, raw, "a number");
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(value)) invalid(key, raw, "a finite number");
  return {value, scaled};
}

int parse_int(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size()) invalid(key, raw, "an integer");
  return static_cast<int>(value);
}

// Values as written, resolved once v0 is known.
struct Pending {
  double value = 0.0;
  bool scaled = false;
  double resolve(double v0) const { return scaled ? value * v0 : value; }
};

struct PendingRange {
  Pending start, end;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + path + "'");
  return file;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file = open_output(path);
  file << text;
  if (!file) throw ConfigError("write failed for '" + path + "'");
}

// JSON with floats at 17 significant digits (the library default is the
// shortest round-trip form).
void write_json(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ", ";
        first = false;
        out += Json(key).dump();
        out += ": ";
        write_json(value, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        write_json(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += fmt(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

std::string json_text(const Json& j) {
  std::string out;
  write_json(j, out);
  out += '\n';
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<BranchSeed> seeds_for(const RunConfig& config) {
  if (!config.seeds_file.empty()) return read_seeds(config.seeds_file);
  return static_seeds(config.params.with_v1(0.0));
}

StepPolicy policy_for(const RunConfig& config, SweepParameter parameter) {
  StepPolicy policy;
  policy.parameter = parameter;
  policy.variant = config.variant;
  if (config.n_sidebands) policy.truncation = Truncation{*config.n_sidebands};
  return policy;
}

FloquetProblem problem_for(const RunConfig& config, const WellParams& params) {
  const Truncation truncation = config.n_sidebands ? Truncation{*config.n_sidebands} : default_truncation(params);
  return FloquetProblem(params, truncation, config.variant);
}

RootResult solve_seed(const RunConfig& config, const FloquetProblem& problem) {
  const RootResult root = problem.polish(*config.seed);
  if (!root.converged) {
    throw SolverError("not_converged", "no root converged from seed (" + fmt(config.seed->real()) + ", " +
                                           fmt(config.seed->imag()) + "); residual " + fmt(root.residual));
  }
  return root;
}

void run_static(const RunConfig& config, std::ostream& out) {
  const WellParams params = config.params.with_v1(0.0);
  const StaticSpectrum spectrum = solve_static(params);
  const FloquetProblem problem(params, Truncation{0}, config.variant);
  const double v0 = params.v0;
  std::string text = "label,kind,re_eps,im_eps,re_eps_over_v0,im_eps_over_v0,residual\n";
  int index = 0;
  for (const ComplexEnergy& e : spectrum.levels()) {
    const bool bound = index < static_cast<int>(spectrum.bound.size());
    text += "E" + std::to_string(index++) + "," + (bound ? "bound" : "resonance") + "," + fmt(e.real()) + "," +
            fmt(e.imag()) + "," + fmt(e.real() / v0) + "," + fmt(e.imag() / v0) + "," + fmt(problem.residual(e)) + "\n";
  }
  emit(config.output, text, out);
}

void run_solve(const RunConfig& config, std::ostream& out) {
  const FloquetProblem problem = problem_for(config, config.params);
  const RootResult root = solve_seed(config, problem);
  const double v0 = config.params.v0;
  double zone_re = root.eps.real();
  long zone = 0;
  if (config.params.omega > 0.0) {
    const ZoneReduced z = reduce_to_first_zone(root.eps, config.params.omega);
    zone_re = z.eps.real();
    zone = z.shift;
  }
  std::string text = "re_eps,im_eps,re_eps_zone,n_zone,residual,iterations,n_sidebands,re_eps_over_v0,im_eps_over_v0\n";
  text += fmt(root.eps.real()) + "," + fmt(root.eps.imag()) + "," + fmt(zone_re) + "," + std::to_string(zone) + "," +
          fmt(root.residual) + "," + std::to_string(root.iterations) + "," + std::to_string(problem.truncation().n) +
          "," + fmt(root.eps.real() / v0) + "," + fmt(root.eps.imag() / v0) + "\n";
  emit(config.output, text, out);
}

void run_sweep_command(const RunConfig& config, std::ostream& out) {
  const SweepParameter parameter = config.sweep_parameter;
  const Range range = parameter == SweepParameter::kOmega ? *config.omega_range : *config.v1_range;
  const WellParams start = with_parameter(config.params, parameter, range.start);
  const StepPolicy policy = policy_for(config, parameter);
  const std::vector<BranchSeed> seeds = driven_seeds(start, seeds_for(config), policy_for(config, SweepParameter::kV1));

  SweepConfig sweep;
  sweep.p_start = range.start;
  sweep.p_end = range.end;
  sweep.grid_points = config.grid_points;
  sweep.refinement = config.refinement;
  sweep.policy = policy;
  const SweepResult result = run_sweep(start, seeds, sweep);

  const double v0 = config.params.v0;
  std::string csv =
      "param,re_eps,im_eps,re_eps_zone,n_zone,residual,branch_label,param_over_v0,re_eps_over_v0,im_eps_over_v0\n";
  for (const BranchTrace& trace : result.traces) {
    for (const TracePoint& p : trace.points) {
      const double omega = parameter == SweepParameter::kOmega ? p.parameter : config.params.omega;
      const ZoneReduced z = reduce_to_first_zone(p.eps, omega);
      csv += fmt(p.parameter) + "," + fmt(p.eps.real()) + "," + fmt(p.eps.imag()) + "," + fmt(z.eps.real()) + "," +
             std::to_string(z.shift) + "," + fmt(p.residual) + "," + trace.label + "," + fmt(p.parameter / v0) + "," +
             fmt(p.eps.real() / v0) + "," + fmt(p.eps.imag() / v0) + "\n";
    }
  }
  Json events = Json::array();
  for (const CrossingEvent& e : result.events) {
    events.push_back({{"kind", to_string(e.kind)},
                      {"parameter_value", e.parameter_value},
                      {"gap_re", e.gap_re},
                      {"gap_im", e.gap_im},
                      {"branches", {e.branches.first, e.branches.second}}});
  }
  std::string events_path = config.events_output;
  if (events_path.empty()) events_path = config.output == "-" ? "events.json" : config.output + ".events.json";
  emit(config.output, csv, out);
  emit(events_path, json_text(events), out);

  for (const BranchTrace& trace : result.traces) {
    if (trace.breakdown) {
      throw SolverError("continuation_breakdown",
                        "branch " + trace.label + " lost at " + to_string(parameter) + " = " + fmt(*trace.breakdown));
    }
  }
}

void run_threshold(const RunConfig& config, std::ostream& out) {
  std::vector<BranchSeed> seeds = seeds_for(config);
  if (seeds.size() < 2) throw SolverError("too_few_levels", "threshold needs two levels, found " + std::to_string(seeds.size()));
  seeds.resize(2);

  ThresholdConfig threshold;
  threshold.window_start = config.omega_range->start;
  threshold.window_end = config.omega_range->end;
  threshold.v1_low = config.v1_range->start;
  threshold.v1_high = config.v1_range->end;
  threshold.window_points = config.window_points;
  threshold.policy = policy_for(config, SweepParameter::kOmega);
  const double v0 = config.params.v0;
  if (config.resolution > 0.0) threshold.resolution = config.resolution / std::abs(v0);
  const ThresholdResult result = threshold_scan(config.params, seeds, threshold);

  Json probes = Json::array();
  for (const auto& [v1, e] : result.probes) {
    probes.push_back({{"v1", v1},
                      {"v1_over_v0", v1 / v0},
                      {"kind", to_string(e.kind)},
                      {"parameter_value", e.parameter_value},
                      {"gap_re", e.gap_re},
                      {"gap_im", e.gap_im}});
  }
  Json report = {{"v1", result.v1},
                 {"v1_over_v0", result.v1 / v0},
                 {"resolution", threshold.resolution * std::abs(v0)},
                 {"window", {threshold.window_start, threshold.window_end}},
                 {"low_kind", to_string(result.low_kind)},
                 {"high_kind", to_string(result.high_kind)},
                 {"branches", {seeds[0].label, seeds[1].label}},
                 {"probes", probes}};
  emit(config.output, json_text(report), out);
}

void run_survival(const RunConfig& config, std::ostream& out) {
  const FloquetProblem problem = problem_for(config, config.params);
  const RootResult root = solve_seed(config, problem);
  const FloquetState state = problem.state(root.eps);
  double t_max = 0.0;
  if (config.t_max) {
    t_max = *config.t_max;
  } else if (config.params.omega > 0.0) {
    t_max = 10.0 * 2.0 * std::numbers::pi / config.params.omega;
  } else {
    t_max = root.eps.imag() < 0.0 ? 3.0 / (2.0 * std::abs(root.eps.imag())) : 10.0;
  }
  std::vector<double> times;
  for (int i = 0; i < config.t_points; ++i)
    times.push_back(config.t_points == 1 ? 0.0 : t_max * i / (config.t_points - 1));
  const SurvivalSeries series = survival(state, config.params, times);
  std::string text = "t,P,h,Pbar\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    text += fmt(series.times[i]) + "," + fmt(series.P[i]) + "," + fmt(series.h[i]) + "," + fmt(series.Pbar[i]) + "\n";
  emit(config.output, text, out);
}

Json error_record(const std::string& kind, const std::string& message, int status) {
  return {{"error", {{"kind", kind}, {"message", message}, {"exit_code", status}}}};
}

}  // namespace

const char* to_string(Command command) {
  switch (command) {
    case Command::kStatic: return "static";
    case Command::kSolve: return "solve";
    case Command::kSweep: return "sweep";
    case Command::kThreshold: return "threshold";
    case Command::kSurvival: return "survival";
  }
  return "?";
}

Command parse_command(const std::string& text) {
  for (Command c : {Command::kStatic, Command::kSolve, Command::kSweep, Command::kThreshold, Command::kSurvival})
    if (text == to_string(c)) return c;
  throw ConfigError("unknown command '" + text + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const KeySpec& spec : key_specs()) out.emplace_back(spec.name);
    return out;
  }();
  return keys;
}

KeyValues parse_config_text(const std::string& text, const std::string& origin) {
  KeyValues values;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value', got '" + line + "'");
    }
    values.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return values;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

RunConfig parse_config(Command command, const KeyValues& values, bool reference_defaults) {
  RunConfig config;
  config.command = command;

  std::map<std::string, Pending> scalars;
  std::map<std::string, PendingRange> ranges;
  std::map<std::string, int> ints;
  std::map<std::string, std::string> texts;
  if (reference_defaults) {
    const WellParams ref = reference_well();
    scalars["a"] = {ref.a, false};
    scalars["b"] = {ref.b, false};
    scalars["v0"] = {ref.v0, false};
    scalars["v0_prime"] = {ref.v0_prime, false};
    scalars["mass"] = {ref.mass, false};
  }

  for (const auto& [key, raw] : values) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    scalars.erase(key);
    ranges.erase(key);
    switch (spec->type) {
      case KeyType::kReal: {
        const auto [v, scaled] = parse_scalar(key, raw, false);
        scalars[key] = {v, scaled};
        break;
      }
      case KeyType::kEnergy: {
        const auto [v, scaled] = parse_scalar(key, raw, true);
        scalars[key] = {v, scaled};
        break;
      }
      case KeyType::kEnergyOrRange: {
        const auto colon = raw.find(':');
        if (colon == std::string::npos) {
          const auto [v, scaled] = parse_scalar(key, raw, true);
          scalars[key] = {v, scaled};
        } else {
          const auto [lo, lo_scaled] = parse_scalar(key, raw.substr(0, colon), true);
          const auto [hi, hi_scaled] = parse_scalar(key, raw.substr(colon + 1), true);
          ranges[key] = {{lo, lo_scaled}, {hi, hi_scaled}};
        }
        break;
      }
      case KeyType::kInt:
        ints[key] = parse_int(key, raw);
        break;
      case KeyType::kText:
        texts[key] = raw;
        break;
    }
  }

  for (const char* required : {"a", "b", "v0", "v0_prime"})
    if (!scalars.count(required)) throw ConfigError(std::string("missing key '") + required + "' (or pass --paper-defaults)");
  const double v0 = scalars["v0"].value;
  auto scalar = [&](const std::string& key, double fallback) {
    const auto it = scalars.find(key);
    return it == scalars.end() ? fallback : it->second.resolve(v0);
  };
  auto range = [&](const std::string& key) -> std::optional<Range> {
    const auto it = ranges.find(key);
    if (it == ranges.end()) return std::nullopt;
    return Range{it->second.start.resolve(v0), it->second.end.resolve(v0)};
  };

  WellParams& p = config.params;
  p.a = scalar("a", 0.0);
  p.b = scalar("b", 0.0);
  p.v0 = v0;
  p.v0_prime = scalar("v0_prime", 0.0);
  p.mass = scalar("mass", 1.0);
  p.v1 = scalar("v1", 0.0);
  p.omega = scalar("omega", 0.0);
  config.omega_range = range("omega");
  config.v1_range = range("v1");

  if (texts.count("variant")) {
    try {
      config.variant = parse_variant(texts["variant"]);
    } catch (const Error&) {
      invalid("variant", texts["variant"], "barrier or bottom");
    }
  }
  if (texts.count("sweep_parameter")) {
    try {
      config.sweep_parameter = parse_sweep_parameter(texts["sweep_parameter"]);
    } catch (const Error&) {
      invalid("sweep_parameter", texts["sweep_parameter"], "omega or v1");
    }
  }
  if (ints.count("n_sidebands")) {
    if (ints["n_sidebands"] < 0) invalid("n_sidebands", std::to_string(ints["n_sidebands"]), "N >= 0");
    config.n_sidebands = ints["n_sidebands"];
  }
  auto positive_int = [&](const char* key, int& target, int minimum) {
    if (!ints.count(key)) return;
    if (ints[key] < minimum) invalid(key, std::to_string(ints[key]), "an integer >= " + std::to_string(minimum));
    target = ints[key];
  };
  positive_int("grid_points", config.grid_points, 2);
  positive_int("refinement", config.refinement, 1);
  positive_int("window_points", config.window_points, 3);
  positive_int("t_points", config.t_points, 1);
  if (texts.count("seeds_file")) config.seeds_file = texts["seeds_file"];
  if (texts.count("output")) config.output = texts["output"];
  if (texts.count("events_output")) config.events_output = texts["events_output"];
  config.resolution = scalar("resolution", 0.0);
  if (config.resolution < 0.0) invalid("resolution", fmt(config.resolution), "resolution > 0");
  if (scalars.count("seed_re") || scalars.count("seed_im")) config.seed = ComplexEnergy(scalar("seed_re", 0.0), scalar("seed_im", 0.0));
  if (scalars.count("t_max")) {
    config.t_max = scalar("t_max", 0.0);
    if (!(*config.t_max >= 0.0)) invalid("t_max", fmt(*config.t_max), "t_max >= 0");
  }

  // Ranges are only meaningful where a command scans that key.
  auto forbid_range = [&](const char* key, const std::optional<Range>& r) {
    if (r) throw ConfigError(std::string("key '") + key + "' takes a single value for command " + to_string(command));
  };
  switch (command) {
    case Command::kSweep: {
      const bool on_omega = config.sweep_parameter == SweepParameter::kOmega;
      const auto& swept = on_omega ? config.omega_range : config.v1_range;
      if (!swept) {
        throw ConfigError(std::string("sweep range required: set ") + (on_omega ? "omega" : "v1") + " = start:end");
      }
      forbid_range(on_omega ? "v1" : "omega", on_omega ? config.v1_range : config.omega_range);
      if (swept->start == swept->end) throw ConfigError("sweep range required: start and end coincide");
      // Validate both ends of the scan.
      for (double value : {swept->start, swept->end}) {
        if (on_omega) p.omega = value;
        else p.v1 = value;
        p.validate();
      }
      if (on_omega) p.omega = swept->start;
      else p.v1 = swept->start;
      break;
    }
    case Command::kThreshold:
      if (!config.omega_range || !config.v1_range) {
        throw ConfigError("threshold ranges required: set v1 = low:high and omega = start:end");
      }
      if (!(config.v1_range->start < config.v1_range->end)) throw ConfigError("threshold: v1 range must have low < high");
      if (!(config.omega_range->start < config.omega_range->end)) throw ConfigError("threshold: omega window must have start < end");
      p.omega = config.omega_range->start;
      p.v1 = config.v1_range->end;
      p.validate();
      p.v1 = config.v1_range->start;
      break;
    case Command::kSolve:
    case Command::kSurvival:
      forbid_range("omega", config.omega_range);
      forbid_range("v1", config.v1_range);
      if (!config.seed) throw ConfigError(std::string(to_string(command)) + " requires seed_re (and optionally seed_im)");
      break;
    case Command::kStatic:
      forbid_range("omega", config.omega_range);
      forbid_range("v1", config.v1_range);
      break;
  }
  p.validate();
  if (config.n_sidebands && p.omega > 0.0 && !satisfies_truncation_rule(p, Truncation{*config.n_sidebands})) {
    throw ConfigError("n_sidebands = " + std::to_string(*config.n_sidebands) + " violates N > v1/omega");
  }
  return config;
}

std::vector<BranchSeed> read_seeds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read seeds file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("seeds file '" + path + "' is empty");
  const std::vector<std::string> header = split_csv(line);
  auto column = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("seeds file '" + path + "' lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t label = column("label"), re = column("re_eps"), im = column("im_eps");
  std::vector<BranchSeed> seeds;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() < header.size()) throw ConfigError(path + ":" + std::to_string(row) + ": too few columns");
    const double x = parse_scalar("re_eps", cells[re], false).first;
    const double y = parse_scalar("im_eps", cells[im], false).first;
    seeds.push_back({cells[label], ComplexEnergy(x, y)});
  }
  if (seeds.empty()) throw ConfigError("seeds file '" + path + "' has no rows");
  return seeds;
}

void run(const RunConfig& config, std::ostream& out) {
  switch (config.command) {
    case Command::kStatic: return run_static(config, out);
    case Command::kSolve: return run_solve(config, out);
    case Command::kSweep: return run_sweep_command(config, out);
    case Command::kThreshold: return run_threshold(config, out);
    case Command::kSurvival: return run_survival(config, out);
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Floquet quasi-energies of a square well with an oscillating barrier", "floqwell"};
  app.require_subcommand(1);

  struct Options {
    std::string config_path;
    bool reference_defaults = false;
    std::map<std::string, std::string> flags;
  };
  std::map<std::string, Options> options;
  const std::vector<std::pair<Command, const char*>> commands = {
      {Command::kStatic, "static spectrum: bound states and resonances"},
      {Command::kSolve, "polish one driven quasi-energy from seed_re, seed_im"},
      {Command::kSweep, "trace branches over an omega or v1 range and classify crossings"},
      {Command::kThreshold, "bisect the v1 where the crossing in an omega window turns avoided"},
      {Command::kSurvival, "non-decay probability P(t), h(t), Pbar(t) of one Floquet state"},
  };
  for (const auto& [command, description] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(command), description);
    Options& o = options[to_string(command)];
    sub->add_option("-c,--config", o.config_path, "flat key = value file");
    sub->add_flag("--paper-defaults", o.reference_defaults, "a=1, b=2, v0=15, v0_prime=7.5, mass=1");
    for (const KeySpec& spec : key_specs()) {
      std::string names = std::string("--") + spec.name;
      std::string dashed = spec.name;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != spec.name) names += ",--" + dashed;
      if (std::string(spec.name) == "output") names += ",-o";
      sub->add_option(names, o.flags[spec.name], spec.help);
    }
  }

  auto fail = [&](const std::string& kind, const std::string& message, int status) {
    err << error_record(kind, message, status).dump() << "\n";
    return status;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail("usage_error", e.what(), 1);
  }

  RunConfig config;
  try {
    CLI::App* chosen = app.get_subcommands().front();
    const Options& o = options[chosen->get_name()];
    KeyValues values;
    if (!o.config_path.empty()) values = read_config_file(o.config_path);
    for (const KeySpec& spec : key_specs())
      if (chosen->count(std::string("--") + spec.name) > 0) values.emplace_back(spec.name, o.flags.at(spec.name));
    config = parse_config(parse_command(chosen->get_name()), values, o.reference_defaults);
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), 1);
  }

  try {
    run(config, out);
  } catch (const ConfigError& e) {
    return fail(e.kind(), e.what(), 1);
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal_error", e.what(), 2);
  }
  return 0;
}

}  // namespace floquet::cli
