#include "cqed/run.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "cqed/io.hpp"

#ifndef CQED_VERSION
#define CQED_VERSION "unknown"
#endif

namespace cqed {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Artifact {
  std::string name;
  std::string content;
};

json preset_json(const Preset& p) {
  return {{"kappa", p.model.kappa}, {"delta", p.model.delta}, {"truncation", p.model.truncation},
          {"x0", p.x0},             {"p0", p.p0},             {"nbar", p.nbar},
          {"z0", p.prep.z0},        {"relative_phase", p.prep.relative_phase}};
}

json integrator_json(const IntegratorOptions& o) {
  return {{"dt", o.dt},
          {"mode", o.mode == StepMode::fixed ? "fixed" : "adaptive"},
          {"rel_tol", o.rel_tol},
          {"abs_tol", o.abs_tol},
          {"sample_every", o.sample_every},
          {"conservation_alarm", o.conservation_alarm},
          {"scheme", o.mode == StepMode::fixed ? "rk4" : "dopri5"}};
}

json chaos_json(const LyapunovOptions& o) {
  return {{"d0", o.d0},
          {"renorm_interval", o.renorm_interval},
          {"transient", o.transient},
          {"total_time", o.total_time},
          {"perturbation_target", to_string(o.target)},
          {"metric", to_string(o.metric)},
          {"bootstrap_block", o.bootstrap_block},
          {"bootstrap_resamples", o.bootstrap_resamples},
          {"seed", o.seed}};
}

std::vector<std::string> collect_warnings(const RunConfig& config) {
  auto warnings = validate(config.preset.model);
  const auto weights = coherent_poisson_weights(config.preset.nbar, config.preset.model.truncation);
  if (weights.truncation_warning()) {
    warnings.push_back("coherent state tail mass " + io::format_double(weights.tail_mass) +
                       " exceeds 1e-6; raise truncation");
  }
  return warnings;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw OutputError("failed writing " + path.string());
}

}  // namespace

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(workers_env_var)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunResult run(const RunConfig& config) {
  validate(config);
  const fs::path dir(config.output_dir);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw OutputError("output directory '" + config.output_dir + "' does not exist");

  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.warnings = collect_warnings(config);

  const std::string spec = canonical_spec(config);
  const std::string hash = io::digest_hex(spec);
  const std::string stem = io::artifact_stem(to_string(config.experiment), spec);
  const ExecutionOptions exec{resolve_workers(config.workers)};
  const Preset& preset = config.preset;

  std::vector<Artifact> artifacts;
  json details = json::object();

  switch (config.experiment) {
    case ExperimentKind::simulate: {
      const Trajectory traj = integrate(prepare(preset), preset.model, config.integrator, config.tau_end);
      artifacts.push_back({stem + ".csv", io::trajectory_csv(traj, preset.model)});
      details = {{"tau_end", config.tau_end},
                 {"sampling_interval", traj.sample_interval},
                 {"steps", traj.steps},
                 {"max_norm_drift", traj.max_norm_drift},
                 {"max_energy_drift", traj.max_energy_drift}};
      break;
    }
    case ExperimentKind::lyapunov: {
      const LyapunovEstimate est = max_lyapunov(prepare(preset), preset.model, config.integrator, config.lyapunov);
      const std::vector<LyapunovRecord> rows{{preset.model.delta, est, {}}};
      PurityVarianceRecord no_purity;
      no_purity.delta = preset.model.delta;
      artifacts.push_back({stem + ".csv", io::delta_sweep_csv(rows, {no_purity})});
      details = json::parse(io::lyapunov_estimate_json(preset, est, config.lyapunov));
      break;
    }
    case ExperimentKind::sweep: {
      const SweepSpec sweep{config.parameter, config.grid, preset};
      const auto grid = config.grid.points();
      if (config.parameter == SweepParameter::delta) {
        const auto lyap = sweep_lyapunov_vs_delta(sweep, config.integrator, config.lyapunov, exec);
        const auto purity = sweep_purity_variance_vs_delta(sweep, config.integrator, config.purity, exec);
        artifacts.push_back({stem + ".csv", io::delta_sweep_csv(lyap, purity)});
        details = {{"purity_window", {config.purity.window.begin, config.purity.window.end}},
                   {"purity_sample_dt", config.purity.sample_dt}};
      } else if (config.parameter == SweepParameter::p0) {
        const auto rows = position_sensitivity_scan(grid, config.tau_snap, preset, config.integrator, exec);
        artifacts.push_back({stem + ".csv", io::position_csv(rows)});
        details = {{"tau_snap", config.tau_snap}};
      } else {
        const auto rows = inversion_map(grid, config.tau_snap, preset, config.integrator, exec);
        artifacts.push_back({stem + ".csv", io::inversion_csv(rows)});
        details = {{"tau_snap", config.tau_snap}};
      }
      break;
    }
    case ExperimentKind::scatter: {
      const auto rows = scattering_scan(config.grid.points(), preset, config.integrator, config.tau_max, exec);
      artifacts.push_back({stem + ".csv", io::scatter_csv(rows)});
      details = {{"tau_max", config.tau_max}, {"exit_nodes", {left_node, right_node}}};
      break;
    }
    case ExperimentKind::inversion_map: {
      const auto rows = inversion_map(config.grid.points(), config.tau_snap, preset, config.integrator, exec);
      artifacts.push_back({stem + ".csv", io::inversion_csv(rows)});
      details = {{"tau_snap", config.tau_snap}};
      break;
    }
    case ExperimentKind::fidelity: {
      const auto runs = fidelity_decay_experiment(preset, config.z0_list, config.integrator, config.fidelity, exec);
      artifacts.push_back({stem + ".csv", io::fidelity_summary_csv(runs)});
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::string series_stem = stem + "-z0_" + io::format_double(runs[i].z0);
        const json extra = {{"z0", runs[i].z0},
                            {"ddelta", config.fidelity.ddelta},
                            {"delta", preset.model.delta},
                            {"overlap", "quantum amplitudes only"}};
        artifacts.push_back({series_stem + ".csv", io::series_csv(runs[i].fidelity)});
        artifacts.push_back({series_stem + ".json", io::series_sidecar_json(runs[i].fidelity, hash, extra.dump())});
      }
      details = {{"ddelta", config.fidelity.ddelta},
                 {"fit_scale", "separation"},
                 {"fit_window", {config.fidelity.fit_window.begin, config.fidelity.fit_window.end}},
                 {"saturation", config.fidelity.saturation}};
      break;
    }
  }

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["schema_version"] = io::manifest_schema_version;
  manifest["experiment"] = to_string(config.experiment);
  manifest["spec_hash"] = hash;
  manifest["config"] = emit_config(config);
  manifest["presets"] = preset_json(preset);
  manifest["integrator"] = integrator_json(config.integrator);
  manifest["chaos"] = chaos_json(config.lyapunov);
  manifest["details"] = details;
  manifest["workers"] = exec.workers;
  manifest["code_version"] = CQED_VERSION;
  manifest["wall_time_s"] = result.wall_seconds;
  manifest["warnings"] = result.warnings;
  json files = json::array();
  for (const auto& a : artifacts) files.push_back(a.name);
  manifest["data_files"] = files;
  artifacts.push_back({stem + ".json", manifest.dump(2) + "\n"});

  std::vector<fs::path> written;
  try {
    for (const auto& a : artifacts) {
      const fs::path path = dir / a.name;
      write_file(path, a.content);
      written.push_back(path);
    }
  } catch (...) {
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
  for (const auto& p : written) result.files.push_back(p.string());
  return result;
}

}  // namespace cqed
