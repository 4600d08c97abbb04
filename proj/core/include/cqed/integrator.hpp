#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqed/state.hpp"

namespace cqed {

enum class StepMode { fixed, adaptive };

struct IntegratorOptions {
  double dt = 0.005;  ///< fixed step, or initial step in adaptive mode
  StepMode mode = StepMode::fixed;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double sample_every = 1.0;
  /// Largest tolerated |norm - norm0| and |W - W0| / max(|W0|, norm0).
  double conservation_alarm = 1e-6;
  bool keep_samples = true;

  bool operator==(const IntegratorOptions&) const = default;
};

void validate(const IntegratorOptions& opts);

/// A step produced a non-finite coordinate.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, SystemState last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const SystemState& last_good() const { return last_good_; }

 private:
  SystemState last_good_;
};

/// Norm or energy drifted past IntegratorOptions::conservation_alarm.
class ConservationAlarm : public std::runtime_error {
 public:
  ConservationAlarm(double norm_drift, double energy_drift, std::size_t steps);
  double norm_drift() const { return norm_drift_; }
  double energy_drift() const { return energy_drift_; }
  std::size_t steps() const { return steps_; }

 private:
  double norm_drift_;
  double energy_drift_;
  std::size_t steps_;
};

/// One classical fourth-order Runge-Kutta step of size dt > 0.
SystemState step(const SystemState& state, const ModelParams& params, double dt);

struct Trajectory {
  std::vector<SystemState> samples;  ///< empty when keep_samples is off
  double sample_interval = 0.0;
  std::size_t steps = 0;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
};

/// Called at every sample time, the initial state included.
using Observer = std::function<void(const SystemState&)>;

/// Integrates from initial.tau to tau_end, sampling every opts.sample_every.
Trajectory integrate(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts,
                     double tau_end, std::span<const Observer> observers = {});

enum class EventKind { node_crossing, turning_point, custom };

const char* to_string(EventKind kind);

using EventFn = std::function<double(StateView)>;

struct EventSpec {
  EventKind kind = EventKind::custom;
  EventFn fn;
  bool terminal = true;
};

struct Event {
  EventKind kind = EventKind::custom;
  std::size_t spec_index = 0;  ///< position of the triggering EventSpec
  double tau_event = 0.0;
  SystemState state_at_event;
};

/// Result of integrate_until. Timing out is a normal outcome: `terminal` is
/// empty and the trajectory spans the whole interval.
struct EventOutcome {
  std::optional<Event> terminal;
  std::vector<Event> events;  ///< non-terminal events, in time order
  Trajectory trajectory;

  bool timed_out() const { return !terminal.has_value(); }
};

/// Tolerances of the event root polish.
inline constexpr double event_time_tolerance = 1e-8;
inline constexpr double event_value_tolerance = 1e-8;

/// Integrates until the first terminal event fires or tau_max is reached.
/// Every sign change of an event function is root-polished on the step
/// bracket.
EventOutcome integrate_until(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts,
                             std::span<const EventSpec> events, double tau_max);

EventOutcome integrate_until(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts,
                             EventFn event_fn, double tau_max);

/// Sequential stepper that can be advanced to arbitrary times and reset
/// mid-run. Used by co-integrated trajectory pairs.
class Propagator {
 public:
  Propagator(const SystemState& initial, const ModelParams& params, const IntegratorOptions& opts);
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) noexcept;

  /// Advances to tau >= current time and returns the state there.
  const SystemState& advance_to(double tau);

  /// Replaces the current state; the next advance restarts from it.
  void reset(const SystemState& state);

  const SystemState& state() const;
  std::size_t steps() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cqed
