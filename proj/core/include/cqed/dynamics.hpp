#pragma once

#include <span>
#include <vector>

#include "cqed/state.hpp"

namespace cqed {

/// Time derivative of every state coordinate, same layout as SystemState.
struct Derivative {
  int truncation = 0;
  std::vector<double> coords;

  double dx() const { return coords[Layout::x]; }
  double dp() const { return coords[Layout::p]; }
  std::span<const double> d_alpha() const { return block(Layout::alpha(truncation)); }
  std::span<const double> d_beta() const { return block(Layout::beta(truncation)); }
  std::span<const double> d_rho() const { return block(Layout::rho(truncation)); }
  std::span<const double> d_eta() const { return block(Layout::eta(truncation)); }

 private:
  std::span<const double> block(std::size_t offset) const {
    return std::span<const double>(coords).subspan(offset, Layout::levels(truncation));
  }
};

/// Right-hand side of the Hamilton-Schroedinger equations on a flat
/// coordinate vector. Hot path used by the integrators; sizes are not checked.
void rhs_into(std::span<const double> y, std::span<double> dy, const ModelParams& params);

/// Checked wrapper around rhs_into.
Derivative rhs(StateView state, const ModelParams& params);

/// Integrals of motion R_n = |a_n|^2 + |b_{n+1}|^2, n = 0..N-1.
std::vector<double> integrals_Rn(StateView state);

/// Total energy: kinetic term, detuning term, and atom-field coupling in the
/// standing wave.
double energy_W(StateView state, const ModelParams& params);

/// Closed-form evolution at zero detuning.
///
/// Valid for states confined to one of the two invariant families
/// {alpha_n, eta_{n+1}} or {beta_n, rho_{n+1}}; on those the force vanishes,
/// x moves ballistically and each coupled pair rotates by sqrt(n+1) Theta with
///   Theta(tau) = [sin(x0 + kappa p0 tau) - sin x0] / (kappa p0).
/// Throws std::invalid_argument for delta != 0, p0 == 0, or mixed families.
SystemState analytic_zero_detuning(const SystemState& initial, const ModelParams& params, double tau);

/// Time-reversal image: p -> -p and complex conjugation of every amplitude.
/// Evolving the image forward retraces the original trajectory backwards.
SystemState time_reversed(const SystemState& state);

}  // namespace cqed
