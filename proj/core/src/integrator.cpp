#include "cqed/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "cqed/dynamics.hpp"

namespace cqed {
namespace {

namespace odeint = boost::numeric::odeint;
using Coords = std::vector<double>;

struct System {
  const ModelParams* params;
  void operator()(const Coords& y, Coords& dy, double /*tau*/) const { rhs_into(y, dy, *params); }
};

using Rk4 = odeint::runge_kutta4<Coords>;
using DenseDopri = odeint::result_of::make_dense_output<odeint::runge_kutta_dopri5<Coords>>::type;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

void check_compatible(const SystemState& state, const ModelParams& params) {
  if (state.truncation() != params.truncation) {
    throw std::invalid_argument("state truncation " + std::to_string(state.truncation()) +
                                " does not match model truncation " + std::to_string(params.truncation));
  }
}

// Single-trajectory stepping engine shared by integrate, integrate_until and
// Propagator. Fixed mode never steps past the requested limit; adaptive mode
// may, and times inside the last step are served from dense output.
class Engine {
 public:
  Engine(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts)
      : params_(params), opts_(opts), system_{&params_}, truncation_(initial.truncation()) {
    reset(Coords(initial.coords().begin(), initial.coords().end()), initial.tau);
  }

  double tau() const { return tau_; }
  double prev_tau() const { return prev_tau_; }
  const Coords& coords() const { return y_; }
  const Coords& prev_coords() const { return prev_; }
  std::size_t steps() const { return steps_; }
  int truncation() const { return truncation_; }

  void reset(Coords y, double tau) {
    y_ = std::move(y);
    prev_ = y_;
    tau_ = prev_tau_ = origin_ = tau;
    count_ = 0;
    if (opts_.mode == StepMode::adaptive) {
      dense_ = odeint::make_dense_output(opts_.abs_tol, opts_.rel_tol, odeint::runge_kutta_dopri5<Coords>());
      dense_.initialize(y_, tau, opts_.dt);
    }
  }

  void step(double limit) {
    prev_ = y_;
    prev_tau_ = tau_;
    if (opts_.mode == StepMode::fixed) {
      const double remaining = limit - tau_;
      if (remaining <= opts_.dt * (1.0 + 1e-9)) {
        rk4_.do_step(system_, y_, tau_, remaining);
        tau_ = origin_ = limit;
        count_ = 0;
      } else {
        rk4_.do_step(system_, y_, tau_, opts_.dt);
        ++count_;
        tau_ = origin_ + static_cast<double>(count_) * opts_.dt;
      }
    } else {
      dense_.do_step(system_);
      y_ = dense_.current_state();
      tau_ = dense_.current_time();
    }
    ++steps_;
    if (!all_finite(y_)) {
      std::ostringstream msg;
      msg << "non-finite state after step " << steps_ << " at tau = " << tau_;
      throw IntegrationError(msg.str(), SystemState(prev_tau_, prev_, truncation_));
    }
  }

  // State at t in [prev_tau, tau].
  void state_at(double t, Coords& out) {
    if (t == tau_) {
      out = y_;
    } else if (opts_.mode == StepMode::fixed) {
      out = prev_;
      if (t != prev_tau_) rk4_.do_step(system_, out, prev_tau_, t - prev_tau_);
    } else {
      out.resize(y_.size());
      dense_.calc_state(t, out);
    }
  }

 private:
  ModelParams params_;
  IntegratorOptions opts_;
  System system_;
  int truncation_;
  Rk4 rk4_;
  DenseDopri dense_;
  Coords y_, prev_;
  double tau_ = 0.0, prev_tau_ = 0.0, origin_ = 0.0;
  std::size_t count_ = 0;
  std::size_t steps_ = 0;
};

class ConservationMonitor {
 public:
  ConservationMonitor(const SystemState& initial, const ModelParams& params, double alarm)
      : params_(params), alarm_(alarm), norm0_(norm2(initial)), energy0_(energy_W(initial, params)) {
    energy_scale_ = std::max({std::abs(energy0_), norm0_, std::numeric_limits<double>::min()});
  }

  void check(StateView state, std::size_t steps, Trajectory& traj) const {
    const double dn = std::abs(norm2(state) - norm0_);
    const double dw = std::abs(energy_W(state, params_) - energy0_) / energy_scale_;
    traj.max_norm_drift = std::max(traj.max_norm_drift, dn);
    traj.max_energy_drift = std::max(traj.max_energy_drift, dw);
    if (dn > alarm_ || dw > alarm_) throw ConservationAlarm(dn, dw, steps);
  }

 private:
  ModelParams params_;
  double alarm_;
  double norm0_;
  double energy0_;
  double energy_scale_ = 1.0;
};

void validate_run(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts) {
  validate(params);
  validate(opts);
  check_compatible(initial, params);
  validate(initial.view());
}

// Regula falsi with the Illinois modification on [a, b], g(a) g(b) < 0.
struct Root {
  double tau;
  Coords coords;
};

Root locate_root(Engine& engine, const EventFn& fn, double a, double ga, double b, double gb) {
  const int truncation = engine.truncation();
  Coords work;
  Root best{b, engine.coords()};
  double best_g = std::abs(gb);
  if (std::abs(ga) < best_g) {
    best = {a, engine.prev_coords()};
    best_g = std::abs(ga);
  }
  int stale_side = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const double width = b - a;
    if (width < event_time_tolerance && best_g < event_value_tolerance) break;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b))) break;

    double c = (a * gb - b * ga) / (gb - ga);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    engine.state_at(c, work);
    const double gc = fn(StateView(c, work, truncation));
    if (std::abs(gc) < best_g) {
      best = {c, work};
      best_g = std::abs(gc);
    }
    if (gc == 0.0) break;
    if ((gc < 0.0) == (ga < 0.0)) {
      a = c;
      ga = gc;
      if (stale_side == -1) gb *= 0.5;
      stale_side = -1;
    } else {
      b = c;
      gb = gc;
      if (stale_side == 1) ga *= 0.5;
      stale_side = 1;
    }
  }
  return best;
}

}  // namespace

ConservationAlarm::ConservationAlarm(double norm_drift, double energy_drift, std::size_t steps)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "conservation alarm after " << steps << " steps: norm drift " << norm_drift << ", energy drift "
            << energy_drift;
        return msg.str();
      }()),
      norm_drift_(norm_drift),
      energy_drift_(energy_drift),
      steps_(steps) {}

void validate(const IntegratorOptions& opts) {
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) throw std::invalid_argument("dt must be positive");
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(opts.sample_every > 0.0) || !std::isfinite(opts.sample_every)) {
    throw std::invalid_argument("sample_every must be positive");
  }
  if (!(opts.conservation_alarm > 0.0)) throw std::invalid_argument("conservation_alarm must be positive");
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::node_crossing: return "node_crossing";
    case EventKind::turning_point: return "turning_point";
    case EventKind::custom: return "custom";
  }
  return "custom";
}

SystemState step(const SystemState& state, const ModelParams& params, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  check_compatible(state, params);
  const Derivative d = rhs(state, params);
  if (!all_finite(d.coords)) throw IntegrationError("non-finite derivative", state);

  Coords y(state.coords().begin(), state.coords().end());
  Rk4 rk4;
  rk4.do_step(System{&params}, y, state.tau, dt);
  if (!all_finite(y)) throw IntegrationError("non-finite state after step", state);
  return SystemState(state.tau + dt, std::move(y), state.truncation());
}

Trajectory integrate(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts,
                     double tau_end, std::span<const Observer> observers) {
  validate_run(initial, params, opts);
  if (!(tau_end > initial.tau)) throw std::invalid_argument("tau_end must exceed the initial time");

  Engine engine(initial, params, opts);
  ConservationMonitor monitor(initial, params, opts.conservation_alarm);
  Trajectory traj;
  traj.sample_interval = opts.sample_every;

  auto emit = [&](const SystemState& s) {
    for (const auto& obs : observers) obs(s);
    if (opts.keep_samples) traj.samples.push_back(s);
  };
  emit(initial);

  Coords work;
  for (std::size_t j = 1;; ++j) {
    const double next = std::min(initial.tau + static_cast<double>(j) * opts.sample_every, tau_end);
    while (engine.tau() < next) engine.step(next);
    engine.state_at(next, work);
    SystemState sample(next, work, initial.truncation());
    traj.steps = engine.steps();
    monitor.check(sample, engine.steps(), traj);
    emit(sample);
    if (next >= tau_end) break;
  }
  return traj;
}

EventOutcome integrate_until(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts,
                             std::span<const EventSpec> events, double tau_max) {
  validate_run(initial, params, opts);
  if (!(tau_max > initial.tau)) throw std::invalid_argument("tau_max must exceed the initial time");
  for (const auto& e : events) {
    if (!e.fn) throw std::invalid_argument("event function is empty");
  }

  const int truncation = initial.truncation();
  Engine engine(initial, params, opts);
  ConservationMonitor monitor(initial, params, opts.conservation_alarm);
  EventOutcome out;
  out.trajectory.sample_interval = opts.sample_every;

  std::vector<double> g_prev(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) g_prev[k] = events[k].fn(initial.view());

  if (opts.keep_samples) out.trajectory.samples.push_back(initial);
  std::size_t next_index = 1;
  auto sample_time = [&](std::size_t j) {
    return std::min(initial.tau + static_cast<double>(j) * opts.sample_every, tau_max);
  };

  Coords work;
  std::vector<double> g_now(events.size());
  std::vector<Event> found;
  while (true) {
    const double limit = opts.mode == StepMode::fixed ? sample_time(next_index) : tau_max;
    engine.step(limit);
    const double a = engine.prev_tau();
    const double b = engine.tau();

    found.clear();
    for (std::size_t k = 0; k < events.size(); ++k) {
      g_now[k] = events[k].fn(StateView(b, engine.coords(), truncation));
      const bool crossed = g_prev[k] != 0.0 && (g_now[k] == 0.0 || (g_now[k] < 0.0) != (g_prev[k] < 0.0));
      if (crossed) {
        Root root = locate_root(engine, events[k].fn, a, g_prev[k], b, g_now[k]);
        if (root.tau <= tau_max) {
          found.push_back(Event{events[k].kind, k, root.tau, SystemState(root.tau, std::move(root.coords), truncation)});
        }
      }
      g_prev[k] = g_now[k];
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const Event& l, const Event& r) { return l.tau_event < r.tau_event; });

    double horizon = std::min(b, tau_max);
    const auto terminal = std::find_if(found.begin(), found.end(),
                                       [&](const Event& e) { return events[e.spec_index].terminal; });
    if (terminal != found.end()) horizon = terminal->tau_event;

    // Samples strictly before a terminal event; up to and including b otherwise.
    while (next_index > 0) {
      const double t = sample_time(next_index);
      const bool due = terminal != found.end() ? t < horizon : t <= horizon;
      if (!due) break;
      engine.state_at(t, work);
      SystemState sample(t, work, truncation);
      out.trajectory.steps = engine.steps();
      monitor.check(sample, engine.steps(), out.trajectory);
      if (opts.keep_samples) out.trajectory.samples.push_back(std::move(sample));
      if (t >= tau_max) {
        next_index = 0;
        break;
      }
      ++next_index;
    }

    for (auto it = found.begin(); it != terminal; ++it) out.events.push_back(std::move(*it));
    if (terminal != found.end()) {
      out.trajectory.steps = engine.steps();
      if (opts.keep_samples) out.trajectory.samples.push_back(terminal->state_at_event);
      out.terminal = std::move(*terminal);
      return out;
    }
    if (next_index == 0 || b >= tau_max) {
      out.trajectory.steps = engine.steps();
      return out;
    }
  }
}

EventOutcome integrate_until(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts,
                             EventFn event_fn, double tau_max) {
  const EventSpec spec{EventKind::custom, std::move(event_fn), true};
  return integrate_until(initial, params, opts, std::span<const EventSpec>(&spec, 1), tau_max);
}

class Propagator::Impl {
 public:
  Impl(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts)
      : engine(initial, params, opts), current(initial) {}
  Engine engine;
  SystemState current;
  Coords work;
};

Propagator::Propagator(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts) {
  validate_run(initial, params, opts);
  impl_ = std::make_unique<Impl>(initial, params, opts);
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

const SystemState& Propagator::advance_to(double tau) {
  if (tau < impl_->current.tau) throw std::invalid_argument("Propagator cannot step backwards");
  if (tau == impl_->current.tau) return impl_->current;
  while (impl_->engine.tau() < tau) impl_->engine.step(tau);
  impl_->engine.state_at(tau, impl_->work);
  impl_->current = SystemState(tau, impl_->work, impl_->engine.truncation());
  return impl_->current;
}

void Propagator::reset(const SystemState& state) {
  if (state.truncation() != impl_->engine.truncation()) {
    throw std::invalid_argument("reset state truncation does not match the propagator");
  }
  impl_->current = state;
  impl_->engine.reset(Coords(state.coords().begin(), state.coords().end()), state.tau);
}

const SystemState& Propagator::state() const { return impl_->current; }

std::size_t Propagator::steps() const { return impl_->engine.steps(); }

}  // namespace cqed
