#include "cqed/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cqed {

std::vector<std::string> validate(const ModelParams& params) {
  if (!(params.kappa > 0.0) || !std::isfinite(params.kappa)) {
    throw std::invalid_argument("kappa must be positive and finite, got " + std::to_string(params.kappa));
  }
  if (!std::isfinite(params.delta)) {
    throw std::invalid_argument("delta must be finite");
  }
  if (params.truncation < 1) {
    throw std::invalid_argument("truncation must be >= 1, got " + std::to_string(params.truncation));
  }
  std::vector<std::string> warnings;
  if (params.kappa >= 0.1) {
    warnings.push_back("kappa = " + std::to_string(params.kappa) +
                       " is not small; the classical-momentum approximation assumes kappa << 1");
  }
  return warnings;
}

void validate(const AtomPrep& prep) {
  if (!(std::abs(prep.z0) <= 1.0)) {
    throw std::invalid_argument("z0 must lie in [-1, 1], got " + std::to_string(prep.z0));
  }
  if (!std::isfinite(prep.relative_phase)) {
    throw std::invalid_argument("relative_phase must be finite");
  }
}

FieldWeights coherent_poisson_weights(double nbar, int truncation) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw std::invalid_argument("nbar must be a finite non-negative number");
  }
  if (truncation < 1) {
    throw std::invalid_argument("truncation must be >= 1");
  }
  FieldWeights out;
  out.amplitudes.assign(Layout::levels(truncation), 0.0);
  if (nbar == 0.0) {
    out.amplitudes[0] = 1.0;
    return out;
  }

  const double log_nbar = std::log(nbar);
  // log of the Poisson probability e^{-nbar} nbar^n / n!
  auto log_pmf = [&](double n) { return -nbar + n * log_nbar - std::lgamma(n + 1.0); };

  double head = 0.0;
  for (int n = 0; n <= truncation; ++n) {
    const double c = std::exp(0.5 * log_pmf(n));
    out.amplitudes[static_cast<std::size_t>(n)] = c;
    head += c * c;
  }

  if (head < 0.5) {
    out.tail_mass = 1.0 - head;
    return out;
  }
  // Terms past the mode decrease monotonically; stop once they no longer
  // change the sum.
  double tail = 0.0;
  for (int n = truncation + 1;; ++n) {
    const double term = std::exp(log_pmf(n));
    tail += term;
    if (n > nbar && (term <= tail * 1e-17 || term == 0.0)) break;
  }
  out.tail_mass = tail;
  return out;
}

FieldWeights fock_weights(int photons, int truncation) {
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  if (photons < 0 || photons > truncation) {
    throw std::invalid_argument("Fock index must lie in [0, truncation]");
  }
  FieldWeights out;
  out.amplitudes.assign(Layout::levels(truncation), 0.0);
  out.amplitudes[static_cast<std::size_t>(photons)] = 1.0;
  return out;
}

StateView::StateView(double tau, std::span<const double> coords, int truncation)
    : tau_(tau), coords_(coords), truncation_(truncation) {
  if (coords.size() != Layout::size(truncation)) {
    throw std::invalid_argument("state coordinate vector does not match truncation");
  }
}

SystemState::SystemState(int truncation) : truncation_(truncation), coords_(Layout::size(truncation), 0.0) {
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
}

SystemState::SystemState(double tau_, std::vector<double> coords, int truncation)
    : tau(tau_), truncation_(truncation), coords_(std::move(coords)) {
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  if (coords_.size() != Layout::size(truncation)) {
    throw std::invalid_argument("state coordinate vector does not match truncation");
  }
}

SystemState init_state(double x0, double p0, const FieldWeights& field, const AtomPrep& prep,
                       const ModelParams& params) {
  validate(params);
  validate(prep);
  if (field.amplitudes.size() != Layout::levels(params.truncation)) {
    throw std::invalid_argument("field weights do not match truncation");
  }
  if (!std::isfinite(x0) || !std::isfinite(p0)) {
    throw std::invalid_argument("initial x0 and p0 must be finite");
  }

  SystemState state(params.truncation);
  state.x() = x0;
  state.p() = p0;

  // z0 = +-1 must leave the other level exactly empty.
  const double upper = prep.z0 == -1.0 ? 0.0 : std::sqrt((1.0 + prep.z0) / 2.0);
  const double lower = prep.z0 == 1.0 ? 0.0 : std::sqrt((1.0 - prep.z0) / 2.0);
  const double lower_re = lower * std::cos(prep.relative_phase);
  const double lower_im = lower * std::sin(prep.relative_phase);

  auto alpha = state.alpha();
  auto rho = state.rho();
  auto eta = state.eta();
  for (std::size_t n = 0; n < state.levels(); ++n) {
    const double c = field.amplitudes[n];
    alpha[n] = upper * c;
    rho[n] = lower_re * c;
    eta[n] = lower_im * c;
  }
  return state;
}

SystemState init_state(double x0, double p0, double nbar, const AtomPrep& prep, const ModelParams& params) {
  validate(params);
  return init_state(x0, p0, coherent_poisson_weights(nbar, params.truncation), prep, params);
}

double norm2(StateView state) {
  double sum = 0.0;
  for (double v : state.coords().subspan(Layout::amplitudes)) sum += v * v;
  return sum;
}

void validate(StateView state) {
  for (double v : state.coords()) {
    if (!std::isfinite(v)) throw std::invalid_argument("state contains a non-finite entry");
  }
  if (!std::isfinite(state.tau())) throw std::invalid_argument("state time is not finite");
  const double n = norm2(state);
  if (n > 1.0 + 1e-12) {
    throw std::invalid_argument("state norm exceeds one: " + std::to_string(n));
  }
}

}  // namespace cqed
