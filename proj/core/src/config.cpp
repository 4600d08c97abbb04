#include "cqed/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "cqed/io.hpp"

namespace cqed {
namespace {

// Thrown by setters; the parser adds line and key.
struct RangeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view v) {
  try {
    const double d = io::parse_double(v);
    if (!std::isfinite(d)) throw RangeError("must be finite");
    return d;
  } catch (const RangeError&) {
    throw;
  } catch (const std::exception&) {
    throw RangeError("expected a number, got '" + std::string(v) + "'");
  }
}

long long to_integer(std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw RangeError("expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<double> to_list(std::string_view v) {
  std::vector<double> out;
  v = trim(v);
  if (v.empty()) return out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(to_double(trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v = v.substr(comma + 1);
  }
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += io::format_double(v[i]);
  }
  return out;
}

std::string num(double v) { return io::format_double(v); }

double positive(double v) {
  if (!(v > 0.0)) throw RangeError("must be > 0");
  return v;
}
double non_negative(double v) {
  if (!(v >= 0.0)) throw RangeError("must be >= 0");
  return v;
}
double unit_interval(double v) {
  if (!(v >= -1.0 && v <= 1.0)) throw RangeError("must lie in [-1, 1]");
  return v;
}

struct KeyDef {
  std::string_view name;
  std::string_view section;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Section order doubles as emission order.
constexpr std::string_view sections[] = {"run",       "model",   "initial",  "integrator", "lyapunov",
                                         "sweep",     "scatter", "fidelity", "simulate",   "output"};

#define CQED_DOUBLE_KEY(KEY, SECTION, FIELD, CHECK)                                         \
  KeyDef {                                                                                  \
    KEY, SECTION, [](RunConfig& c, std::string_view v) { c.FIELD = CHECK(to_double(v)); }, \
        [](const RunConfig& c) { return num(c.FIELD); }                                     \
  }

double any(double v) { return v; }

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      {"experiment", "run",
       [](RunConfig& c, std::string_view v) {
         try {
           c.experiment = experiment_kind_from_string(std::string(v));
         } catch (const std::invalid_argument& e) {
           throw RangeError(e.what());
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.experiment)); }},

      CQED_DOUBLE_KEY("kappa", "model", preset.model.kappa, positive),
      CQED_DOUBLE_KEY("delta", "model", preset.model.delta, any),
      {"truncation", "model",
       [](RunConfig& c, std::string_view v) {
         const long long n = to_integer(v);
         if (n < 1 || n > 100000) throw RangeError("must lie in [1, 100000]");
         c.preset.model.truncation = static_cast<int>(n);
       },
       [](const RunConfig& c) { return std::to_string(c.preset.model.truncation); }},

      CQED_DOUBLE_KEY("x0", "initial", preset.x0, any),
      CQED_DOUBLE_KEY("p0", "initial", preset.p0, any),
      CQED_DOUBLE_KEY("nbar", "initial", preset.nbar, non_negative),
      CQED_DOUBLE_KEY("z0", "initial", preset.prep.z0, unit_interval),
      CQED_DOUBLE_KEY("phase", "initial", preset.prep.relative_phase, any),

      CQED_DOUBLE_KEY("dt", "integrator", integrator.dt, positive),
      {"mode", "integrator",
       [](RunConfig& c, std::string_view v) {
         if (v == "fixed") {
           c.integrator.mode = StepMode::fixed;
         } else if (v == "adaptive") {
           c.integrator.mode = StepMode::adaptive;
         } else {
           throw RangeError("must be 'fixed' or 'adaptive'");
         }
       },
       [](const RunConfig& c) { return std::string(c.integrator.mode == StepMode::fixed ? "fixed" : "adaptive"); }},
      CQED_DOUBLE_KEY("rel_tol", "integrator", integrator.rel_tol, positive),
      CQED_DOUBLE_KEY("abs_tol", "integrator", integrator.abs_tol, positive),
      CQED_DOUBLE_KEY("sample_every", "integrator", integrator.sample_every, positive),
      CQED_DOUBLE_KEY("conservation_alarm", "integrator", integrator.conservation_alarm, positive),

      CQED_DOUBLE_KEY("d0", "lyapunov", lyapunov.d0, positive),
      CQED_DOUBLE_KEY("renorm_interval", "lyapunov", lyapunov.renorm_interval, positive),
      CQED_DOUBLE_KEY("transient", "lyapunov", lyapunov.transient, non_negative),
      CQED_DOUBLE_KEY("total_time", "lyapunov", lyapunov.total_time, positive),
      {"target", "lyapunov",
       [](RunConfig& c, std::string_view v) {
         try {
           c.lyapunov.target = perturbation_target_from_string(std::string(v));
         } catch (const std::invalid_argument& e) {
           throw RangeError(e.what());
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.lyapunov.target)); }},
      {"metric", "lyapunov",
       [](RunConfig& c, std::string_view v) {
         try {
           c.lyapunov.metric = distance_metric_from_string(std::string(v));
         } catch (const std::invalid_argument& e) {
           throw RangeError(e.what());
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.lyapunov.metric)); }},
      {"bootstrap_block", "lyapunov",
       [](RunConfig& c, std::string_view v) {
         const long long n = to_integer(v);
         if (n < 1) throw RangeError("must be >= 1");
         c.lyapunov.bootstrap_block = static_cast<std::size_t>(n);
       },
       [](const RunConfig& c) { return std::to_string(c.lyapunov.bootstrap_block); }},
      {"bootstrap_resamples", "lyapunov",
       [](RunConfig& c, std::string_view v) {
         const long long n = to_integer(v);
         if (n < 2) throw RangeError("must be >= 2");
         c.lyapunov.bootstrap_resamples = static_cast<std::size_t>(n);
       },
       [](const RunConfig& c) { return std::to_string(c.lyapunov.bootstrap_resamples); }},
      {"seed", "lyapunov",
       [](RunConfig& c, std::string_view v) {
         const long long n = to_integer(v);
         if (n < 0) throw RangeError("must be >= 0");
         c.lyapunov.seed = static_cast<std::uint64_t>(n);
       },
       [](const RunConfig& c) { return std::to_string(c.lyapunov.seed); }},

      {"parameter", "sweep",
       [](RunConfig& c, std::string_view v) {
         try {
           c.parameter = sweep_parameter_from_string(std::string(v));
         } catch (const std::invalid_argument& e) {
           throw RangeError(e.what());
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.parameter)); }},
      CQED_DOUBLE_KEY("grid_min", "sweep", grid.min, any),
      CQED_DOUBLE_KEY("grid_max", "sweep", grid.max, any),
      {"grid_count", "sweep",
       [](RunConfig& c, std::string_view v) {
         const long long n = to_integer(v);
         if (n < 1 || n > 10000000) throw RangeError("must lie in [1, 10000000]");
         c.grid.count = static_cast<int>(n);
       },
       [](const RunConfig& c) { return std::to_string(c.grid.count); }},
      {"grid_values", "sweep", [](RunConfig& c, std::string_view v) { c.grid.values = to_list(v); },
       [](const RunConfig& c) { return list_text(c.grid.values); }},
      CQED_DOUBLE_KEY("window_begin", "sweep", purity.window.begin, non_negative),
      CQED_DOUBLE_KEY("window_end", "sweep", purity.window.end, positive),
      CQED_DOUBLE_KEY("sample_dt", "sweep", purity.sample_dt, positive),
      CQED_DOUBLE_KEY("tau_snap", "sweep", tau_snap, positive),

      CQED_DOUBLE_KEY("tau_max", "scatter", tau_max, positive),

      CQED_DOUBLE_KEY("ddelta", "fidelity", fidelity.ddelta, any),
      {"z0_list", "fidelity",
       [](RunConfig& c, std::string_view v) {
         auto list = to_list(v);
         if (list.empty()) throw RangeError("must list at least one value");
         for (double z : list) unit_interval(z);
         c.z0_list = std::move(list);
       },
       [](const RunConfig& c) { return list_text(c.z0_list); }},
      CQED_DOUBLE_KEY("fidelity_tau_end", "fidelity", fidelity.tau_end, positive),
      CQED_DOUBLE_KEY("fit_begin", "fidelity", fidelity.fit_window.begin, non_negative),
      CQED_DOUBLE_KEY("fit_end", "fidelity", fidelity.fit_window.end, positive),
      CQED_DOUBLE_KEY("saturation", "fidelity", fidelity.saturation, positive),
      CQED_DOUBLE_KEY("fidelity_sample_dt", "fidelity", fidelity.sample_dt, positive),
      CQED_DOUBLE_KEY("report_tau", "fidelity", fidelity.report_tau, non_negative),

      CQED_DOUBLE_KEY("tau_end", "simulate", tau_end, positive),

      {"dir", "output", [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
       [](const RunConfig& c) { return c.output_dir; }},
      {"workers", "output",
       [](RunConfig& c, std::string_view v) {
         const long long n = to_integer(v);
         if (n < 0 || n > 4096) throw RangeError("must lie in [0, 4096]");
         c.workers = static_cast<unsigned>(n);
       },
       [](const RunConfig& c) { return std::to_string(c.workers); }},
  };
  return table;
}

#undef CQED_DOUBLE_KEY

const KeyDef* find_key(std::string_view name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string emit_sections(const RunConfig& config, bool include_output) {
  std::ostringstream out;
  for (std::string_view section : sections) {
    if (section == "output" && !include_output) continue;
    out << '[' << section << "]\n";
    for (const auto& k : key_table()) {
      if (k.section == section) out << k.name << " = " << k.get(config) << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::lyapunov: return "lyapunov";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::scatter: return "scatter";
    case ExperimentKind::fidelity: return "fidelity";
    case ExperimentKind::inversion_map: return "inversion-map";
  }
  return "simulate";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto kind : {ExperimentKind::simulate, ExperimentKind::lyapunov, ExperimentKind::sweep,
                    ExperimentKind::scatter, ExperimentKind::fidelity, ExperimentKind::inversion_map}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line),
      key_(std::move(key)) {}

namespace {

Grid default_grid(const RunConfig& config) {
  SweepParameter axis = config.parameter;
  if (config.experiment == ExperimentKind::scatter) axis = SweepParameter::p0;
  if (config.experiment == ExperimentKind::inversion_map) axis = SweepParameter::z_in;
  switch (axis) {
    case SweepParameter::delta: return Grid{-2.0, 2.0, 81, {}};
    case SweepParameter::p0:
      return config.experiment == ExperimentKind::scatter ? Grid{0.0, 45.0, 2000, {}} : Grid{0.0, 45.0, 901, {}};
    case SweepParameter::z_in: return Grid{-1.0, 1.0, 201, {}};
  }
  return {};
}

}  // namespace

void materialize_defaults(RunConfig& config) {
  if (config.grid.count != 0 || !config.grid.values.empty()) {
    if (config.grid.count == 0) config.grid.count = static_cast<int>(config.grid.values.size());
    return;
  }
  config.grid = default_grid(config);
}

void validate(const RunConfig& config) {
  auto wrap = [](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, what, std::string(what) + ": " + e.what());
    }
  };
  wrap("model", [&] { validate(config.preset); });
  wrap("integrator", [&] { validate(config.integrator); });
  wrap("lyapunov", [&] { validate(config.lyapunov); });
  wrap("sweep", [&] { (void)config.grid.points(); });
  if (config.grid.values.empty() && config.grid.count > 1 && !(config.grid.min <= config.grid.max)) {
    throw ConfigError(0, "grid_min", "grid_min must not exceed grid_max");
  }
  if (!(config.purity.window.end > config.purity.window.begin)) {
    throw ConfigError(0, "window_end", "window_end must exceed window_begin");
  }
  if (!(config.fidelity.fit_window.end > config.fidelity.fit_window.begin)) {
    throw ConfigError(0, "fit_end", "fit_end must exceed fit_begin");
  }
  if (!(config.fidelity.tau_end > config.fidelity.sample_dt)) {
    throw ConfigError(0, "fidelity_tau_end", "fidelity_tau_end must exceed fidelity_sample_dt");
  }
  if (config.experiment == ExperimentKind::sweep && config.parameter == SweepParameter::z_in) {
    for (double z : config.grid.points()) {
      if (std::abs(z) > 1.0) throw ConfigError(0, "grid_max", "z_in grid must lie in [-1, 1]");
    }
  }
  if (config.experiment == ExperimentKind::inversion_map) {
    for (double z : config.grid.points()) {
      if (std::abs(z) > 1.0) throw ConfigError(0, "grid_max", "z_in grid must lie in [-1, 1]");
    }
  }
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
  RunConfig config = base;
  std::set<std::string, std::less<>> seen;
  std::string_view section;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "malformed section header '" + std::string(line) + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(std::begin(sections), std::end(sections), section) == std::end(sections)) {
        throw ConfigError(line_no, "", "unknown section [" + std::string(section) + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, "", "expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const KeyDef* def = find_key(key);
    if (def == nullptr) throw ConfigError(line_no, std::string(key), "unknown key '" + std::string(key) + "'");
    if (!section.empty() && def->section != section) {
      throw ConfigError(line_no, std::string(key),
                        "key '" + std::string(key) + "' belongs to [" + std::string(def->section) + "], not [" +
                            std::string(section) + "]");
    }
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(line_no, std::string(key), "duplicate key '" + std::string(key) + "'");
    }
    try {
      def->set(config, value);
    } catch (const RangeError& e) {
      throw ConfigError(line_no, std::string(key),
                        std::string(key) + " = " + std::string(value) + " out of range: " + e.what());
    }
  }
  // An unset grid takes the experiment default for every bound not given.
  if (base.grid.count == 0 && base.grid.values.empty() && config.grid.values.empty()) {
    const Grid fallback = default_grid(config);
    if (!seen.contains("grid_min")) config.grid.min = fallback.min;
    if (!seen.contains("grid_max")) config.grid.max = fallback.max;
    if (!seen.contains("grid_count")) config.grid.count = fallback.count;
  }
  materialize_defaults(config);
  validate(config);
  return config;
}

std::string emit_config(const RunConfig& config) { return emit_sections(config, true); }

std::string canonical_spec(const RunConfig& config) { return emit_sections(config, false); }

const std::vector<NamedPreset>& presets() {
  static const std::vector<NamedPreset> table = [] {
    std::vector<NamedPreset> out;
    auto make = [](ExperimentKind kind, auto&& tweak) {
      RunConfig c;
      c.experiment = kind;
      tweak(c);
      materialize_defaults(c);
      return c;
    };
    out.push_back({"fig1", "Lyapunov exponent and purity variance versus detuning",
                   make(ExperimentKind::sweep, [](RunConfig& c) {
                     c.parameter = SweepParameter::delta;
                     c.grid = Grid{-2.0, 2.0, 81, {}};
                   })});
    out.push_back({"fig2a", "escape time and turn count versus initial momentum",
                   make(ExperimentKind::scatter, [](RunConfig& c) {
                     c.preset.model.delta = 0.4;
                     c.grid = Grid{0.0, 45.0, 2000, {}};
                   })});
    out.push_back({"fig2b", "position at a fixed time versus initial momentum",
                   make(ExperimentKind::sweep, [](RunConfig& c) {
                     c.preset.model.delta = 0.4;
                     c.parameter = SweepParameter::p0;
                     c.grid = Grid{0.0, 45.0, 901, {}};
                   })});
    out.push_back({"fig2c", "output inversion versus input inversion",
                   make(ExperimentKind::inversion_map, [](RunConfig& c) {
                     c.preset.model.delta = 0.4;
                     c.parameter = SweepParameter::z_in;
                     c.grid = Grid{-1.0, 1.0, 201, {}};
                   })});
    out.push_back({"fig3", "fidelity decay for slightly different detunings",
                   make(ExperimentKind::fidelity, [](RunConfig& c) {
                     c.preset.model.delta = 0.4;
                     c.fidelity.ddelta = 1e-4;
                     c.z0_list = {1.0, -1.0, 0.0};
                   })});
    out.push_back({"zero-detuning-check", "resonant run over two periods of the closed-form solution",
                   make(ExperimentKind::simulate, [](RunConfig& c) {
                     c.preset.model.delta = 0.0;
                     c.integrator.sample_every = 0.25;
                     c.tau_end = 2.0 * std::numbers::pi / (c.preset.model.kappa * c.preset.p0);
                   })});
    return out;
  }();
  return table;
}

RunConfig preset_config(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.config;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::string presets_table() {
  std::ostringstream out;
  for (const auto& p : presets()) {
    const RunConfig& c = p.config;
    out << p.name << "  (" << to_string(c.experiment) << ")  " << p.description << '\n';
    out << "    kappa=" << num(c.preset.model.kappa) << " delta=" << num(c.preset.model.delta)
        << " N=" << c.preset.model.truncation << " x0=" << num(c.preset.x0) << " p0=" << num(c.preset.p0)
        << " nbar=" << num(c.preset.nbar) << " z0=" << num(c.preset.prep.z0) << " dt=" << num(c.integrator.dt)
        << '\n';
    switch (c.experiment) {
      case ExperimentKind::sweep:
        out << "    " << to_string(c.parameter) << "-grid [" << num(c.grid.min) << ", " << num(c.grid.max) << "] x "
            << c.grid.count;
        if (c.parameter == SweepParameter::delta) {
          out << "  purity window [" << num(c.purity.window.begin) << ", " << num(c.purity.window.end) << "]";
        } else {
          out << "  tau_snap=" << num(c.tau_snap);
        }
        out << '\n';
        break;
      case ExperimentKind::scatter:
        out << "    p0-grid [" << num(c.grid.min) << ", " << num(c.grid.max) << "] x " << c.grid.count
            << "  tau_max=" << num(c.tau_max) << '\n';
        break;
      case ExperimentKind::inversion_map:
        out << "    z_in-grid [" << num(c.grid.min) << ", " << num(c.grid.max) << "] x " << c.grid.count
            << "  tau_snap=" << num(c.tau_snap) << '\n';
        break;
      case ExperimentKind::fidelity:
        out << "    ddelta=" << num(c.fidelity.ddelta) << "  z0 in {" << list_text(c.z0_list)
            << "}  tau_end=" << num(c.fidelity.tau_end) << '\n';
        break;
      case ExperimentKind::simulate:
        out << "    tau_end=" << num(c.tau_end) << "  sample_every=" << num(c.integrator.sample_every) << '\n';
        break;
      case ExperimentKind::lyapunov:
        out << "    total_time=" << num(c.lyapunov.total_time) << '\n';
        break;
    }
  }
  return out.str();
}

}  // namespace cqed
