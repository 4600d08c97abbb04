#include "cqed/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqed {

double inversion(StateView state) {
  double upper = 0.0;
  double lower = 0.0;
  const auto alpha = state.alpha();
  const auto beta = state.beta();
  const auto rho = state.rho();
  const auto eta = state.eta();
  for (std::size_t n = 0; n < state.levels(); ++n) {
    upper += alpha[n] * alpha[n] + beta[n] * beta[n];
    lower += rho[n] * rho[n] + eta[n] * eta[n];
  }
  return upper - lower;
}

ReducedDensity reduced_density(StateView state) {
  const auto alpha = state.alpha();
  const auto beta = state.beta();
  const auto rho = state.rho();
  const auto eta = state.eta();
  ReducedDensity out;
  double re = 0.0;
  double im = 0.0;
  for (std::size_t n = 0; n < state.levels(); ++n) {
    out.p22 += alpha[n] * alpha[n] + beta[n] * beta[n];
    out.p11 += rho[n] * rho[n] + eta[n] * eta[n];
    // (alpha + i beta)(rho - i eta)
    re += alpha[n] * rho[n] + beta[n] * eta[n];
    im += beta[n] * rho[n] - alpha[n] * eta[n];
  }
  out.coherence = {re, im};
  return out;
}

std::pair<double, double> ReducedDensity::normalized_eigenvalues() const {
  const double t = trace();
  if (!(t > 0.0)) return {0.0, 0.0};
  const double half_gap = std::hypot(0.5 * (p22 - p11), std::abs(coherence)) / t;
  const double hi = std::min(1.0, 0.5 + half_gap);
  // 1 - hi loses accuracy near a pure state; det / t^2 = hi * lo keeps it.
  const double det = (p22 * p11 - std::norm(coherence)) / (t * t);
  const double lo = hi > 0.0 ? std::max(0.0, det / hi) : 0.0;
  return {hi, lo};
}

double purity_raw(StateView state) {
  const auto alpha = state.alpha();
  const auto beta = state.beta();
  const auto rho = state.rho();
  const auto eta = state.eta();
  double upper = 0.0;
  double lower = 0.0;
  double in_phase = 0.0;
  double quadrature = 0.0;
  for (std::size_t n = 0; n < state.levels(); ++n) {
    upper += alpha[n] * alpha[n] + beta[n] * beta[n];
    lower += rho[n] * rho[n] + eta[n] * eta[n];
    in_phase += alpha[n] * rho[n] + beta[n] * eta[n];
    quadrature += alpha[n] * eta[n] - beta[n] * rho[n];
  }
  return upper * upper + lower * lower + 2.0 * in_phase * in_phase + 2.0 * quadrature * quadrature;
}

double purity(StateView state) {
  const double n = norm2(state);
  if (!(n > 0.0)) throw std::invalid_argument("purity of a zero state is undefined");
  return purity_raw(state) / (n * n);
}

double entropy(StateView state) {
  const auto [hi, lo] = reduced_density(state).normalized_eigenvalues();
  double s = 0.0;
  for (double l : {hi, lo}) {
    if (l > 1e-15) s -= l * std::log(l);
  }
  return s;
}

double fidelity(StateView first, StateView second) {
  if (first.truncation() != second.truncation()) {
    throw std::invalid_argument("fidelity requires equal truncation");
  }
  const auto a1 = first.alpha();
  const auto b1 = first.beta();
  const auto r1 = first.rho();
  const auto e1 = first.eta();
  const auto a2 = second.alpha();
  const auto b2 = second.beta();
  const auto r2 = second.rho();
  const auto e2 = second.eta();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t n = 0; n < first.levels(); ++n) {
    re += a1[n] * a2[n] + b1[n] * b2[n] + r1[n] * r2[n] + e1[n] * e2[n];
    im += a1[n] * b2[n] - b1[n] * a2[n] + r1[n] * e2[n] - e1[n] * r2[n];
  }
  return re * re + im * im;
}

double normalized_fidelity(StateView first, StateView second) {
  const double n1 = norm2(first);
  const double n2 = norm2(second);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw std::invalid_argument("fidelity of a zero state is undefined");
  return fidelity(first, second) / (n1 * n2);
}

ObservableSeries::ObservableSeries(std::string name, std::vector<double> taus, std::vector<double> values)
    : name_(std::move(name)) {
  if (taus.size() != values.size()) throw std::invalid_argument("series times and values differ in length");
  taus_.reserve(taus.size());
  values_.reserve(values.size());
  for (std::size_t i = 0; i < taus.size(); ++i) push(taus[i], values[i]);
}

void ObservableSeries::push(double tau, double value) {
  if (!taus_.empty() && !(tau > taus_.back())) {
    throw std::invalid_argument("series '" + name_ + "': sample times must increase strictly");
  }
  taus_.push_back(tau);
  values_.push_back(value);
}

double series_variance(const ObservableSeries& series, Window window) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (window.contains(series.taus()[i])) {
      sum += series.values()[i];
      ++count;
    }
  }
  if (count < 2) {
    throw std::invalid_argument("series '" + series.name() + "' has fewer than two samples in the window");
  }
  const double mean = sum / static_cast<double>(count);
  // Two-pass form: <(v - <v>)^2> equals <v^2> - <v>^2 without cancellation.
  double sq = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (window.contains(series.taus()[i])) {
      const double d = series.values()[i] - mean;
      sq += d * d;
    }
  }
  return std::sqrt(sq / static_cast<double>(count));
}

}  // namespace cqed
