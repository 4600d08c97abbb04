#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cqed/integrator.hpp"
#include "cqed/observables.hpp"
#include "cqed/state.hpp"

namespace cqed {

/// Coordinates that receive the initial offset d0.
enum class PerturbationTarget { position, momentum, full_state };

/// Separation measure between the reference and companion trajectories.
enum class DistanceMetric { full_state, position };

const char* to_string(PerturbationTarget target);
const char* to_string(DistanceMetric metric);
PerturbationTarget perturbation_target_from_string(const std::string& name);
DistanceMetric distance_metric_from_string(const std::string& name);

struct LyapunovOptions {
  double d0 = 1e-8;
  double renorm_interval = 1.0;
  double transient = 50.0;
  double total_time = 2000.0;  ///< accumulated after the transient
  PerturbationTarget target = PerturbationTarget::position;
  DistanceMetric metric = DistanceMetric::full_state;
  std::size_t bootstrap_block = 50;  ///< stretch samples per bootstrap block
  std::size_t bootstrap_resamples = 400;
  std::uint64_t seed = 20030101;

  bool operator==(const LyapunovOptions&) const = default;
};

void validate(const LyapunovOptions& opts);

struct LyapunovEstimate {
  // NaN until estimated, so failed sweep points never read as lambda = 0
  double lambda = std::numeric_limits<double>::quiet_NaN();     ///< units of Omega0
  double std_error = std::numeric_limits<double>::quiet_NaN();  ///< moving-block bootstrap over the log-stretch samples
  bool converged = false;  ///< first- and second-half estimates agree
  double first_half = std::numeric_limits<double>::quiet_NaN();
  double second_half = std::numeric_limits<double>::quiet_NaN();
  std::size_t renormalizations = 0;
};

/// Two-trajectory (Benettin) estimate of the maximal Lyapunov exponent.
///
/// A companion offset by d0 is co-integrated with the reference; every
/// renorm_interval the log-stretch ln(d/d0) is recorded and the companion
/// pulled back to distance d0 along the current separation. Stretches inside
/// the transient are discarded.
LyapunovEstimate max_lyapunov(const SystemState& initial, const ModelParams& params,
                              const IntegratorOptions& integrator, const LyapunovOptions& opts);

/// Time after which an initial uncertainty dx0 grows past dx_confidence:
/// ln(dx_confidence / dx0) / lambda. Throws std::domain_error for lambda <= 0.
double predictability_horizon(double lambda, double dx_confidence, double dx0);

/// How a fidelity series is turned into a rate.
enum class DecayScale {
  /// slope of -ln f against tau (pure exponential decay f = exp(-rate tau))
  linear,
  /// half the slope of ln(-ln f) against tau; for f near 1, -ln f ~ 1 - f grows
  /// like the squared state separation, exp(2 lambda tau)
  separation,
};

struct DecayFit {
  double rate = 0.0;
  double goodness = 0.0;  ///< coefficient of determination of the line fit
  std::size_t samples = 0;
};

/// Least-squares decay rate of a fidelity series over a window.
/// Throws std::invalid_argument on samples with f <= 0 (or f >= 1 on the
/// separation scale) or fewer than two samples in the window.
DecayFit fit_decay_rate(const ObservableSeries& fidelity, Window window, DecayScale scale = DecayScale::linear);

}  // namespace cqed
