#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "floquet/error.hpp"
#include "floquet/matching.hpp"
#include "floquet/model.hpp"
#include "floquet/sweep.hpp"

namespace floquet::cli {

// Bad configuration: unknown key, unparsable value, missing setting.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config_error", message) {}
};

enum class Command { kStatic, kSolve, kSweep, kThreshold, kSurvival };

const char* to_string(Command command);
Command parse_command(const std::string& text);

struct Range {
  double start = 0.0;
  double end = 0.0;
};

struct RunConfig {
  Command command = Command::kStatic;
  WellParams params;
  Variant variant = Variant::kBarrierDriven;
  std::optional<int> n_sidebands;

  // sweep: the swept key holds a range; threshold: v1 range and omega window
  SweepParameter sweep_parameter = SweepParameter::kOmega;
  std::optional<Range> omega_range;
  std::optional<Range> v1_range;
  int grid_points = 200;
  int refinement = 10;
  std::string seeds_file;  // spectrum CSV; default: the computed static levels

  // threshold
  double resolution = 0.0;  // energy; 0 means 0.002 v0
  int window_points = 300;

  // solve, survival
  std::optional<ComplexEnergy> seed;
  std::optional<double> t_max;
  int t_points = 201;

  std::string output = "-";
  std::string events_output;  // sweep only; default derived from output
};

// Ordered key/value pairs; later entries override earlier ones.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Keys accepted in config files and as --key flags.
const std::vector<std::string>& config_keys();

// Flat `key = value` lines, `#` starts a comment.
KeyValues read_config_file(const std::string& path);
KeyValues parse_config_text(const std::string& text, const std::string& origin = "config");

RunConfig parse_config(Command command, const KeyValues& values, bool reference_defaults);

// Seeds from a CSV with label, re_eps and im_eps columns.
std::vector<BranchSeed> read_seeds(const std::string& path);

// Executes the command; "-" as an output path means `out`. Throws on failure
// after writing whatever output was produced.
void run(const RunConfig& config, std::ostream& out);

// Full command line. Errors go to `err` as a one-line JSON record.
// Exit status: 0 success, 1 usage or config error, 2 solver failure.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace floquet::cli
