#include "cqed/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace cqed {

void rhs_into(std::span<const double> y, std::span<double> dy, const ModelParams& params) {
  const int N = params.truncation;
  const std::size_t levels = Layout::levels(N);
  const double* alpha = y.data() + Layout::alpha(N);
  const double* beta = y.data() + Layout::beta(N);
  const double* rho = y.data() + Layout::rho(N);
  const double* eta = y.data() + Layout::eta(N);
  double* d_alpha = dy.data() + Layout::alpha(N);
  double* d_beta = dy.data() + Layout::beta(N);
  double* d_rho = dy.data() + Layout::rho(N);
  double* d_eta = dy.data() + Layout::eta(N);

  const double x = y[Layout::x];
  const double half_delta = 0.5 * params.delta;
  const double cos_x = std::cos(x);

  // Free detuning rotation of every amplitude, including b_0 and the
  // boundary pair alpha_N, beta_N.
  for (std::size_t n = 0; n < levels; ++n) {
    d_alpha[n] = -half_delta * beta[n];
    d_beta[n] = half_delta * alpha[n];
    d_rho[n] = half_delta * eta[n];
    d_eta[n] = -half_delta * rho[n];
  }

  // Coupling a_n <-> b_{n+1}; couplings to n = N+1 are dropped.
  double force = 0.0;
  for (std::size_t n = 0; n + 1 < levels; ++n) {
    const double g = std::sqrt(static_cast<double>(n + 1));
    const double gc = g * cos_x;
    d_alpha[n] -= gc * eta[n + 1];
    d_beta[n] += gc * rho[n + 1];
    d_rho[n + 1] -= gc * beta[n];
    d_eta[n + 1] += gc * alpha[n];
    force += g * (alpha[n] * rho[n + 1] + beta[n] * eta[n + 1]);
  }

  dy[Layout::x] = params.kappa * y[Layout::p];
  dy[Layout::p] = -2.0 * std::sin(x) * force;
}

Derivative rhs(StateView state, const ModelParams& params) {
  if (state.truncation() != params.truncation) {
    throw std::invalid_argument("state truncation " + std::to_string(state.truncation()) +
                                " does not match model truncation " + std::to_string(params.truncation));
  }
  Derivative out;
  out.truncation = params.truncation;
  out.coords.assign(state.coords().size(), 0.0);
  rhs_into(state.coords(), out.coords, params);
  return out;
}

std::vector<double> integrals_Rn(StateView state) {
  const auto alpha = state.alpha();
  const auto beta = state.beta();
  const auto rho = state.rho();
  const auto eta = state.eta();
  std::vector<double> r(state.levels() - 1);
  for (std::size_t n = 0; n < r.size(); ++n) {
    r[n] = alpha[n] * alpha[n] + beta[n] * beta[n] + rho[n + 1] * rho[n + 1] + eta[n + 1] * eta[n + 1];
  }
  return r;
}

double energy_W(StateView state, const ModelParams& params) {
  const auto alpha = state.alpha();
  const auto beta = state.beta();
  const auto rho = state.rho();
  const auto eta = state.eta();
  double inversion = 0.0;
  double coupling = 0.0;
  for (std::size_t n = 0; n + 1 < state.levels(); ++n) {
    inversion += alpha[n] * alpha[n] + beta[n] * beta[n] - rho[n + 1] * rho[n + 1] - eta[n + 1] * eta[n + 1];
    coupling += std::sqrt(static_cast<double>(n + 1)) * (alpha[n] * rho[n + 1] + beta[n] * eta[n + 1]);
  }
  const double p = state.p();
  return 0.5 * params.kappa * p * p - 0.5 * params.delta * inversion - 2.0 * std::cos(state.x()) * coupling;
}

SystemState analytic_zero_detuning(const SystemState& initial, const ModelParams& params, double tau) {
  if (params.delta != 0.0) {
    throw std::invalid_argument("closed-form evolution requires delta = 0");
  }
  if (initial.truncation() != params.truncation) {
    throw std::invalid_argument("state truncation does not match model truncation");
  }
  const double p0 = initial.p();
  if (p0 == 0.0) {
    throw std::invalid_argument("closed-form evolution requires p0 != 0");
  }

  const auto alpha0 = initial.alpha();
  const auto beta0 = initial.beta();
  const auto rho0 = initial.rho();
  const auto eta0 = initial.eta();
  bool upper_family = true;  // only alpha_n, eta_{n+1} populated
  bool lower_family = true;  // only beta_n, rho_{n+1} populated
  for (std::size_t n = 0; n < initial.levels(); ++n) {
    if (beta0[n] != 0.0 || (n > 0 && rho0[n] != 0.0)) upper_family = false;
    if (alpha0[n] != 0.0 || (n > 0 && eta0[n] != 0.0)) lower_family = false;
  }
  if (!upper_family && !lower_family) {
    throw std::invalid_argument(
        "closed-form evolution requires the state to lie in the {alpha, eta} or {beta, rho} family");
  }

  const double x0 = initial.x();
  const double velocity = params.kappa * p0;
  const double elapsed = tau - initial.tau;
  const double theta = (std::sin(x0 + velocity * elapsed) - std::sin(x0)) / velocity;

  SystemState out = initial;
  out.tau = tau;
  out.x() = x0 + velocity * elapsed;
  auto alpha = out.alpha();
  auto beta = out.beta();
  auto rho = out.rho();
  auto eta = out.eta();
  // Pairs (alpha_n, eta_{n+1}) and (beta_n, rho_{n+1}) rotate by sqrt(n+1) Theta.
  // b_0 and a_N are uncoupled and constant at zero detuning.
  for (std::size_t n = 0; n + 1 < initial.levels(); ++n) {
    const double angle = std::sqrt(static_cast<double>(n + 1)) * theta;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    alpha[n] = alpha0[n] * c - eta0[n + 1] * s;
    eta[n + 1] = eta0[n + 1] * c + alpha0[n] * s;
    beta[n] = beta0[n] * c + rho0[n + 1] * s;
    rho[n + 1] = rho0[n + 1] * c - beta0[n] * s;
  }
  return out;
}

SystemState time_reversed(const SystemState& state) {
  SystemState out = state;
  out.p() = -state.p();
  for (double& v : out.beta()) v = -v;
  for (double& v : out.eta()) v = -v;
  return out;
}

}  // namespace cqed
