#include "cqed/chaos.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cqed {
namespace {

double separation(const SystemState& ref, const SystemState& comp, DistanceMetric metric) {
  if (metric == DistanceMetric::position) return std::abs(comp.x() - ref.x());
  const auto a = ref.coords();
  const auto b = comp.coords();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

SystemState offset_companion(const SystemState& ref, const LyapunovOptions& opts) {
  SystemState comp = ref;
  switch (opts.target) {
    case PerturbationTarget::position:
      comp.x() += opts.d0;
      break;
    case PerturbationTarget::momentum:
      comp.p() += opts.d0;
      break;
    case PerturbationTarget::full_state: {
      auto c = comp.coords();
      const double per_coord = opts.d0 / std::sqrt(static_cast<double>(c.size()));
      for (double& v : c) v += per_coord;
      break;
    }
  }
  return comp;
}

double mean_rate(std::span<const double> stretches, double interval) {
  const double sum = std::accumulate(stretches.begin(), stretches.end(), 0.0);
  return sum / (static_cast<double>(stretches.size()) * interval);
}

// Moving-block bootstrap of the mean stretch rate.
double block_bootstrap_error(const std::vector<double>& stretches, double interval, const LyapunovOptions& opts) {
  const std::size_t n = stretches.size();
  if (n < 2 || opts.bootstrap_resamples < 2) return 0.0;
  const std::size_t block = std::clamp<std::size_t>(opts.bootstrap_block, 1, n);
  const std::size_t starts = n - block + 1;
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, starts - 1);

  std::vector<double> rates;
  rates.reserve(opts.bootstrap_resamples);
  for (std::size_t r = 0; r < opts.bootstrap_resamples; ++r) {
    double sum = 0.0;
    std::size_t taken = 0;
    while (taken < n) {
      const std::size_t s = pick(rng);
      for (std::size_t i = 0; i < block && taken < n; ++i, ++taken) sum += stretches[s + i];
    }
    rates.push_back(sum / (static_cast<double>(n) * interval));
  }
  const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
  double sq = 0.0;
  for (double v : rates) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(rates.size() - 1));
}

}  // namespace

const char* to_string(PerturbationTarget target) {
  switch (target) {
    case PerturbationTarget::position: return "position";
    case PerturbationTarget::momentum: return "momentum";
    case PerturbationTarget::full_state: return "full_state";
  }
  return "position";
}

const char* to_string(DistanceMetric metric) {
  return metric == DistanceMetric::position ? "position" : "full_state";
}

PerturbationTarget perturbation_target_from_string(const std::string& name) {
  if (name == "position") return PerturbationTarget::position;
  if (name == "momentum") return PerturbationTarget::momentum;
  if (name == "full_state") return PerturbationTarget::full_state;
  throw std::invalid_argument("unknown perturbation target '" + name + "'");
}

DistanceMetric distance_metric_from_string(const std::string& name) {
  if (name == "full_state") return DistanceMetric::full_state;
  if (name == "position") return DistanceMetric::position;
  throw std::invalid_argument("unknown distance metric '" + name + "'");
}

void validate(const LyapunovOptions& opts) {
  if (!(opts.d0 > 0.0)) throw std::invalid_argument("d0 must be positive");
  if (!(opts.renorm_interval > 0.0)) throw std::invalid_argument("renorm_interval must be positive");
  if (!(opts.transient >= 0.0)) throw std::invalid_argument("transient must be non-negative");
  if (!(opts.total_time > opts.transient)) throw std::invalid_argument("total_time must exceed transient");
  if (opts.total_time < opts.renorm_interval) {
    throw std::invalid_argument("total_time must cover at least one renormalization interval");
  }
}

LyapunovEstimate max_lyapunov(const SystemState& initial, const ModelParams& params,
                              const IntegratorOptions& integrator, const LyapunovOptions& opts) {
  validate(opts);
  validate(initial.view());

  Propagator reference(initial, params, integrator);
  Propagator companion(offset_companion(initial, opts), params, integrator);

  const auto skip = static_cast<std::size_t>(std::llround(opts.transient / opts.renorm_interval));
  const auto keep = static_cast<std::size_t>(std::llround(opts.total_time / opts.renorm_interval));
  std::vector<double> stretches;
  stretches.reserve(keep);

  for (std::size_t k = 1; k <= skip + keep; ++k) {
    const double t = initial.tau + static_cast<double>(k) * opts.renorm_interval;
    const SystemState& ref = reference.advance_to(t);
    SystemState comp = companion.advance_to(t);
    const double d = separation(ref, comp, opts.metric);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::runtime_error("trajectory separation collapsed or diverged at tau = " + std::to_string(t));
    }
    if (k > skip) stretches.push_back(std::log(d / opts.d0));

    // Pull the companion back to distance d0 along the current separation.
    const double scale = opts.d0 / d;
    auto c = comp.coords();
    const auto r = ref.coords();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = r[i] + (c[i] - r[i]) * scale;
    companion.reset(comp);
  }

  LyapunovEstimate est;
  est.renormalizations = stretches.size();
  est.lambda = mean_rate(stretches, opts.renorm_interval);
  est.std_error = block_bootstrap_error(stretches, opts.renorm_interval, opts);
  const std::size_t half = stretches.size() / 2;
  if (half > 0) {
    est.first_half = mean_rate(std::span<const double>(stretches).first(half), opts.renorm_interval);
    est.second_half = mean_rate(std::span<const double>(stretches).subspan(half), opts.renorm_interval);
    const double allowed = std::max(3.0 * std::sqrt(2.0) * est.std_error, 1e-3);
    est.converged = std::abs(est.first_half - est.second_half) <= allowed;
  }
  return est;
}

double predictability_horizon(double lambda, double dx_confidence, double dx0) {
  if (!(lambda > 0.0)) {
    throw std::domain_error("predictability horizon is undefined for a non-positive Lyapunov exponent");
  }
  if (!(dx0 > 0.0) || !(dx_confidence > dx0)) {
    throw std::invalid_argument("predictability horizon requires dx_confidence > dx0 > 0");
  }
  return std::log(dx_confidence / dx0) / lambda;
}

DecayFit fit_decay_rate(const ObservableSeries& fidelity, Window window, DecayScale scale) {
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t i = 0; i < fidelity.size(); ++i) {
    const double tau = fidelity.taus()[i];
    if (!window.contains(tau)) continue;
    const double f = fidelity.values()[i];
    if (!(f > 0.0)) throw std::invalid_argument("fidelity samples must be positive");
    const double loss = -std::log(f);
    if (scale == DecayScale::linear) {
      y.push_back(loss);
    } else {
      if (!(loss > 0.0)) throw std::invalid_argument("separation-scale fit needs fidelity below one");
      y.push_back(0.5 * std::log(loss));
    }
    t.push_back(tau);
  }
  if (t.size() < 2 || t.front() == t.back()) throw std::invalid_argument("decay fit window is degenerate");

  const double n = static_cast<double>(t.size());
  const double t_mean = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double stt = 0.0;
  double sty = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - t_mean) * (t[i] - t_mean);
    sty += (t[i] - t_mean) * (y[i] - y_mean);
    syy += (y[i] - y_mean) * (y[i] - y_mean);
  }
  DecayFit fit;
  fit.samples = t.size();
  fit.rate = sty / stt;
  const double residual = std::max(0.0, syy - fit.rate * sty);
  fit.goodness = syy > 0.0 ? 1.0 - residual / syy : 1.0;
  return fit;
}

}  // namespace cqed
