// cqed: batch front end for the atom-cavity simulations.
//
//   cqed <experiment> [--preset NAME] [--config FILE] [--out DIR] [--workers N]
//   cqed presets
//
// Exit status: 0 success, 1 runtime or output failure, 2 bad configuration.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cqed/config.hpp"
#include "cqed/run.hpp"

namespace {

constexpr int exit_runtime = 1;
constexpr int exit_config = 2;

struct Flags {
  std::string config_path;
  std::string preset;
  std::string out;
  unsigned workers = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cqed::ConfigError(0, "", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cqed::RunConfig resolve_config(cqed::ExperimentKind kind, const Flags& flags) {
  cqed::RunConfig base;
  if (!flags.preset.empty()) {
    try {
      base = cqed::preset_config(flags.preset);
    } catch (const std::invalid_argument& e) {
      throw cqed::ConfigError(0, "preset", e.what());
    }
    if (base.experiment != kind) {
      throw cqed::ConfigError(0, "preset", "preset '" + flags.preset + "' runs '" + cqed::to_string(base.experiment) +
                                               "', not '" + cqed::to_string(kind) + "'");
    }
  }
  base.experiment = kind;
  std::string text = flags.config_path.empty() ? std::string() : read_file(flags.config_path);
  cqed::RunConfig config = cqed::parse_config(text, base);
  if (config.experiment != kind) {
    throw cqed::ConfigError(0, "experiment", std::string("config selects '") + cqed::to_string(config.experiment) +
                                                 "' but the subcommand is '" + cqed::to_string(kind) + "'");
  }
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (flags.workers > 0) {
    config.workers = flags.workers;
  } else if (std::getenv(cqed::workers_env_var) != nullptr) {
    config.workers = 0;  // the environment wins over the config file
  }
  cqed::validate(config);
  return config;
}

int execute(cqed::ExperimentKind kind, const Flags& flags) {
  cqed::RunConfig config;
  try {
    config = resolve_config(kind, flags);
  } catch (const cqed::ConfigError& e) {
    std::cerr << "cqed: config error: " << e.what() << '\n';
    return exit_config;
  }
  try {
    const cqed::RunResult result = cqed::run(config);
    for (const auto& w : result.warnings) std::cerr << "cqed: warning: " << w << '\n';
    for (const auto& f : result.files) std::cout << f << '\n';
    return EXIT_SUCCESS;
  } catch (const cqed::ConfigError& e) {
    std::cerr << "cqed: config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "cqed: " << e.what() << '\n';
    return exit_runtime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical atom in a standing-wave cavity: trajectories, chaos indicators and sweeps"};
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char*, cqed::ExperimentKind> experiments[] = {
      {"simulate", cqed::ExperimentKind::simulate},   {"lyapunov", cqed::ExperimentKind::lyapunov},
      {"sweep", cqed::ExperimentKind::sweep},         {"scatter", cqed::ExperimentKind::scatter},
      {"fidelity", cqed::ExperimentKind::fidelity},   {"inversion-map", cqed::ExperimentKind::inversion_map},
  };

  int status = EXIT_SUCCESS;
  for (const auto& [name, kind] : experiments) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", flags.config_path, "key = value config file");
    sub->add_option("--preset", flags.preset, "start from a named preset (see `cqed presets`)");
    sub->add_option("--out", flags.out, "output directory (must exist)");
    sub->add_option("--workers", flags.workers, std::string("worker threads; overrides $") + cqed::workers_env_var)
        ->check(CLI::PositiveNumber);
    sub->callback([&, kind = kind] { status = execute(kind, flags); });
  }
  app.add_subcommand("presets", "list the built-in presets")->callback([] { std::cout << cqed::presets_table(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }
  return status;
}
