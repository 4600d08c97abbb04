#include "cqed/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cqed/dynamics.hpp"

namespace cqed {

void validate(const Preset& preset) {
  validate(preset.model);
  validate(preset.prep);
  if (!std::isfinite(preset.x0) || !std::isfinite(preset.p0)) throw std::invalid_argument("x0 and p0 must be finite");
  if (!(preset.nbar >= 0.0)) throw std::invalid_argument("nbar must be non-negative");
}

SystemState prepare(const Preset& preset) {
  validate(preset);
  return init_state(preset.x0, preset.p0, preset.nbar, preset.prep, preset.model);
}

std::vector<double> Grid::points() const {
  if (!values.empty()) return values;
  if (count < 1) throw std::invalid_argument("grid count must be >= 1");
  if (!(min <= max)) throw std::invalid_argument("grid min must not exceed max");
  if (count == 1) return {min};
  // Weighted form keeps round grids exact, e.g. 0.2 rather than 0.20000000000000018.
  std::vector<double> out(static_cast<std::size_t>(count));
  const double intervals = static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = (min * (intervals - i) + max * i) / intervals;
  }
  return out;
}

const char* to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::delta: return "delta";
    case SweepParameter::p0: return "p0";
    case SweepParameter::z_in: return "z_in";
  }
  return "delta";
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
  if (name == "delta") return SweepParameter::delta;
  if (name == "p0") return SweepParameter::p0;
  if (name == "z_in") return SweepParameter::z_in;
  throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

Preset at_grid_point(const SweepSpec& spec, double value) {
  Preset p = spec.preset;
  switch (spec.parameter) {
    case SweepParameter::delta: p.model.delta = value; break;
    case SweepParameter::p0: p.p0 = value; break;
    case SweepParameter::z_in: p.prep.z0 = value; break;
  }
  return p;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
  const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

namespace {

template <typename Record, typename Fn>
std::vector<Record> run_grid(const std::vector<double>& grid, const ExecutionOptions& exec, Fn&& point) {
  std::vector<Record> out(grid.size());
  parallel_for(grid.size(), exec.workers, [&](std::size_t i) {
    try {
      out[i] = point(grid[i]);
    } catch (const std::exception& e) {
      out[i] = Record{};
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace

std::vector<LyapunovRecord> sweep_lyapunov_vs_delta(const SweepSpec& spec, const IntegratorOptions& integrator,
                                                    const LyapunovOptions& opts, const ExecutionOptions& exec) {
  if (spec.parameter != SweepParameter::delta) throw std::invalid_argument("Lyapunov sweep runs over delta");
  validate(opts);
  validate(integrator);
  const auto grid = spec.grid.points();
  auto out = run_grid<LyapunovRecord>(grid, exec, [&](double delta) {
    const Preset p = at_grid_point(spec, delta);
    return LyapunovRecord{delta, max_lyapunov(prepare(p), p.model, integrator, opts), {}};
  });
  for (std::size_t i = 0; i < grid.size(); ++i) out[i].delta = grid[i];
  return out;
}

std::pair<ObservableSeries, ObservableSeries> purity_entropy_series(const Preset& preset,
                                                                    const IntegratorOptions& integrator,
                                                                    const PurityVarianceOptions& options) {
  if (!(options.sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");
  if (!(options.window.end > options.window.begin)) throw std::invalid_argument("empty purity window");
  IntegratorOptions io = integrator;
  io.sample_every = options.sample_dt;
  io.keep_samples = false;
  ObservableSeries purity_series("purity");
  ObservableSeries entropy_series("entropy");
  const Observer record = [&](const SystemState& s) {
    purity_series.push(s.tau, purity(s));
    entropy_series.push(s.tau, entropy(s));
  };
  const SystemState initial = prepare(preset);
  integrate(initial, preset.model, io, options.window.end, std::span<const Observer>(&record, 1));
  return {std::move(purity_series), std::move(entropy_series)};
}

std::vector<PurityVarianceRecord> sweep_purity_variance_vs_delta(const SweepSpec& spec,
                                                                 const IntegratorOptions& integrator,
                                                                 const PurityVarianceOptions& options,
                                                                 const ExecutionOptions& exec) {
  if (spec.parameter != SweepParameter::delta) throw std::invalid_argument("purity sweep runs over delta");
  validate(integrator);
  const auto grid = spec.grid.points();
  auto out = run_grid<PurityVarianceRecord>(grid, exec, [&](double delta) {
    const auto [purity_series, entropy_series] = purity_entropy_series(at_grid_point(spec, delta), integrator, options);
    PurityVarianceRecord r;
    r.delta = delta;
    r.sigma_purity = series_variance(purity_series, options.window);
    r.sigma_entropy = series_variance(entropy_series, options.window);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < purity_series.size(); ++i) {
      if (options.window.contains(purity_series.taus()[i])) {
        sum += purity_series.values()[i];
        ++count;
      }
    }
    r.mean_purity = sum / static_cast<double>(count);
    return r;
  });
  for (std::size_t i = 0; i < grid.size(); ++i) out[i].delta = grid[i];
  return out;
}

const char* to_string(ExitSide side) {
  switch (side) {
    case ExitSide::left: return "left";
    case ExitSide::right: return "right";
    case ExitSide::trapped: return "trapped";
  }
  return "trapped";
}

ScatterRecord scatter_one(const Preset& preset, const IntegratorOptions& integrator, double tau_max) {
  IntegratorOptions io = integrator;
  io.keep_samples = false;
  const std::vector<EventSpec> events{
      {EventKind::node_crossing, [](StateView s) { return s.x() - left_node; }, true},
      {EventKind::node_crossing, [](StateView s) { return s.x() - right_node; }, true},
      {EventKind::turning_point, [](StateView s) { return s.p(); }, false},
  };
  const EventOutcome outcome = integrate_until(prepare(preset), preset.model, io, events, tau_max);

  ScatterRecord r;
  r.p0 = preset.p0;
  r.turns = static_cast<int>(std::count_if(outcome.events.begin(), outcome.events.end(),
                                           [](const Event& e) { return e.kind == EventKind::turning_point; }));
  if (outcome.timed_out()) {
    r.side = ExitSide::trapped;
    r.escape_time = tau_max;
  } else {
    r.side = outcome.terminal->spec_index == 0 ? ExitSide::left : ExitSide::right;
    r.escape_time = outcome.terminal->tau_event;
  }
  return r;
}

std::vector<ScatterRecord> scattering_scan(const std::vector<double>& p0_grid, const Preset& preset,
                                           const IntegratorOptions& integrator, double tau_max,
                                           const ExecutionOptions& exec) {
  validate(preset);
  validate(integrator);
  auto out = run_grid<ScatterRecord>(p0_grid, exec, [&](double p0) {
    Preset p = preset;
    p.p0 = p0;
    return scatter_one(p, integrator, tau_max);
  });
  for (std::size_t i = 0; i < p0_grid.size(); ++i) out[i].p0 = p0_grid[i];
  return out;
}

std::vector<ScatterRecord> refine_escape_endpoint(const ScatterRecord& inside, const ScatterRecord& outside,
                                                  const Preset& preset, const IntegratorOptions& integrator,
                                                  double tau_max, int levels) {
  auto same_class = [](const ScatterRecord& a, const ScatterRecord& b) {
    return a.side == b.side && a.turns == b.turns;
  };
  if (same_class(inside, outside)) throw std::invalid_argument("refinement bracket must straddle two classes");
  ScatterRecord in = inside;
  ScatterRecord out = outside;
  std::vector<ScatterRecord> chain;
  chain.reserve(static_cast<std::size_t>(std::max(levels, 0)));
  for (int level = 0; level < levels; ++level) {
    Preset p = preset;
    p.p0 = 0.5 * (in.p0 + out.p0);
    ScatterRecord mid = scatter_one(p, integrator, tau_max);
    if (same_class(mid, in)) {
      in = mid;
    } else {
      out = mid;
    }
    chain.push_back(in);
  }
  return chain;
}

std::vector<PositionRecord> position_sensitivity_scan(const std::vector<double>& p0_grid, double tau_snap,
                                                      const Preset& preset, const IntegratorOptions& integrator,
                                                      const ExecutionOptions& exec) {
  validate(preset);
  validate(integrator);
  if (!(tau_snap > 0.0)) throw std::invalid_argument("tau_snap must be positive");
  auto out = run_grid<PositionRecord>(p0_grid, exec, [&](double p0) {
    Preset p = preset;
    p.p0 = p0;
    IntegratorOptions io = integrator;
    io.sample_every = tau_snap;
    const Trajectory traj = integrate(prepare(p), p.model, io, tau_snap);
    return PositionRecord{p0, traj.samples.back().x(), {}};
  });
  for (std::size_t i = 0; i < p0_grid.size(); ++i) out[i].p0 = p0_grid[i];
  return out;
}

std::vector<InversionRecord> inversion_map(const std::vector<double>& z_in_grid, double tau_snap,
                                           const Preset& preset, const IntegratorOptions& integrator,
                                           const ExecutionOptions& exec) {
  validate(preset);
  validate(integrator);
  if (!(tau_snap > 0.0)) throw std::invalid_argument("tau_snap must be positive");
  auto out = run_grid<InversionRecord>(z_in_grid, exec, [&](double z_in) {
    Preset p = preset;
    p.prep.z0 = z_in;
    IntegratorOptions io = integrator;
    io.sample_every = tau_snap;
    const Trajectory traj = integrate(prepare(p), p.model, io, tau_snap);
    return InversionRecord{z_in, inversion(traj.samples.back()), {}};
  });
  for (std::size_t i = 0; i < z_in_grid.size(); ++i) out[i].z_in = z_in_grid[i];
  return out;
}

namespace {

FidelityRun fidelity_run(const Preset& preset, double z0, const IntegratorOptions& integrator,
                         const FidelityOptions& options) {
  Preset p = preset;
  p.prep.z0 = z0;
  const SystemState initial = prepare(p);
  ModelParams shifted = p.model;
  shifted.delta += options.ddelta;

  Propagator first(initial, p.model, integrator);
  Propagator second(initial, shifted, integrator);

  FidelityRun run;
  run.z0 = z0;
  ObservableSeries normalized("normalized_fidelity");
  auto record = [&](const SystemState& a, const SystemState& b) {
    run.fidelity.push(a.tau, fidelity(a, b));
    const double fn = normalized_fidelity(a, b);
    normalized.push(a.tau, fn);
    if (1.0 - fn > 0.0) run.log10_infidelity.push(a.tau, std::log10(1.0 - fn));
    run.separation_x.push(a.tau, b.x() - a.x());
  };
  record(initial, initial);
  const auto samples = static_cast<std::size_t>(std::llround((options.tau_end - initial.tau) / options.sample_dt));
  for (std::size_t k = 1; k <= samples; ++k) {
    const double t = initial.tau + static_cast<double>(k) * options.sample_dt;
    const SystemState& a = first.advance_to(t);
    const SystemState& b = second.advance_to(t);
    record(a, b);
  }

  // Growth stage: from the window start until 1 - f first reaches saturation.
  Window fit_window = options.fit_window;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const double t = normalized.taus()[i];
    if (t >= fit_window.begin && 1.0 - normalized.values()[i] >= options.saturation) {
      fit_window.end = std::min(fit_window.end, t);
      break;
    }
  }
  ObservableSeries growth("normalized_fidelity");
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const double f = normalized.values()[i];
    if (fit_window.contains(normalized.taus()[i]) && f < 1.0 && f > 0.0) growth.push(normalized.taus()[i], f);
  }
  run.fitted = fit_window;
  if (growth.size() >= 2) run.fit = fit_decay_rate(growth, fit_window, DecayScale::separation);

  for (std::size_t i = 0; i < normalized.size(); ++i) {
    if (normalized.taus()[i] >= options.report_tau) {
      run.one_minus_f_at_report = 1.0 - normalized.values()[i];
      break;
    }
  }
  return run;
}

}  // namespace

std::vector<FidelityRun> fidelity_decay_experiment(const Preset& preset, const std::vector<double>& z0_list,
                                                   const IntegratorOptions& integrator,
                                                   const FidelityOptions& options, const ExecutionOptions& exec) {
  validate(preset);
  validate(integrator);
  if (!std::isfinite(options.ddelta)) throw std::invalid_argument("ddelta must be finite");
  if (!(options.sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");
  if (!(options.tau_end > options.sample_dt)) throw std::invalid_argument("tau_end must exceed sample_dt");
  auto out =
      run_grid<FidelityRun>(z0_list, exec, [&](double z0) { return fidelity_run(preset, z0, integrator, options); });
  for (std::size_t i = 0; i < z0_list.size(); ++i) out[i].z0 = z0_list[i];
  return out;
}

}  // namespace cqed
