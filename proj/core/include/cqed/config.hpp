#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/chaos.hpp"
#include "cqed/experiments.hpp"
#include "cqed/integrator.hpp"

namespace cqed {

enum class ExperimentKind { simulate, lyapunov, sweep, scatter, fidelity, inversion_map };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Everything a run needs. All defaults are materialized by parse_config.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::simulate;
  Preset preset;
  IntegratorOptions integrator;
  LyapunovOptions lyapunov;

  // simulate
  double tau_end = 500.0;

  // sweep / scatter / inversion-map
  SweepParameter parameter = SweepParameter::delta;
  Grid grid{0.0, 0.0, 0, {}};  ///< count 0: per-experiment default on parse
  PurityVarianceOptions purity;
  double tau_snap = 250.0;
  double tau_max = 2e4;

  // fidelity
  FidelityOptions fidelity;
  std::vector<double> z0_list{1.0, -1.0, 0.0};

  // output
  std::string output_dir = ".";
  unsigned workers = 0;  ///< 0: available hardware parallelism

  bool operator==(const RunConfig&) const = default;
};

/// Parse or range error. line is 1-based, 0 for whole-config checks.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& message);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Parses `key = value` lines with optional [section] headers ('#' comments).
/// Unknown keys, duplicates and keys under the wrong section are errors.
/// Keys override `base`; grid defaults for the experiment are filled in last.
RunConfig parse_config(std::string_view text, const RunConfig& base = {});

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Canonical text without the [output] section. Identifies the science of a
/// run independently of where and how parallel it executes.
std::string canonical_spec(const RunConfig& config);

/// Cross-key validation; throws ConfigError with line 0.
void validate(const RunConfig& config);

/// Fills a zero-count grid with the experiment's default.
void materialize_defaults(RunConfig& config);

struct NamedPreset {
  std::string name;
  std::string description;
  RunConfig config;
};

const std::vector<NamedPreset>& presets();
RunConfig preset_config(std::string_view name);

/// Human-readable table of all presets and their parameter blocks.
std::string presets_table();

}  // namespace cqed
