#pragma once

// Scenarios: a validated SystemConfig, an id that reproduces it, and an
// optional one-parameter sweep.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fdrelay/relaysys.hpp"

namespace fdrelay::cli {

/// Unreadable or invalid configuration, preset or sweep.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepParam { target_rate, source_power, alpha, mu, eh_time_fraction };

std::string_view sweep_param_name(SweepParam p);
SweepParam parse_sweep_param(std::string_view name);

struct Sweep {
  SweepParam param = SweepParam::target_rate;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  /// start + k step for every k with start + k step <= stop + step / 2.
  std::vector<double> values() const;
  void validate() const;
};

/// Parses "start:stop:step".
Sweep parse_sweep(SweepParam param, std::string_view text);

/// Sets the parameter on `cfg`; alpha and mu go to both hops, not the LBI branch.
void apply_sweep_value(relaysys::SystemConfig& cfg, SweepParam param, double value);

struct Scenario {
  std::string id;
  relaysys::SystemConfig config;
  std::optional<Sweep> sweep;
  std::vector<std::string> warnings;  ///< defaults filled in while loading
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"rayleigh", "weibull", "nakagami"};
  return names;
}

/// Built-in preset; the files under presets/ hold the same values.
Scenario preset_scenario(std::string_view name);

/// Strict JSON: SystemConfig field names, plus optional "id" and "sweep"
/// ({"parameter", "start", "stop", "step"}). Unknown keys are rejected;
/// eh_time_fraction and block_time may be omitted.
Scenario parse_scenario(std::string_view json_text, std::string_view source = "<string>");
Scenario load_scenario(const std::string& path);

/// Knobs applied on top of a preset or file, recorded in the scenario id.
struct Overrides {
  std::optional<double> mu;  ///< all three branches, like the presets
  std::optional<double> eta;
  std::optional<double> rate;
  std::optional<double> power;
  std::optional<double> lbi_r_hat;
};

void apply_overrides(Scenario& sc, const Overrides& ov);

/// "<base>;key=value;...;sweep=<param>". The base is a preset name or
/// "config=<path>".
std::string make_scenario_id(std::string_view base, const Overrides& ov, SweepParam sweep);

/// Rebuilds the config and sweep parameter named by an id.
struct IdentifiedConfig {
  relaysys::SystemConfig config;
  SweepParam sweep_param;
};
IdentifiedConfig scenario_from_id(std::string_view id);

/// Shortest decimal text that reads back as the same double.
std::string format_shortest(double v);

}  // namespace fdrelay::cli
