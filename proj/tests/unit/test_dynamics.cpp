#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cqed/dynamics.hpp"
#include "cqed/integrator.hpp"
#include "cqed/observables.hpp"
#include "support.hpp"

using namespace cqed;

namespace {

// Energy plus the free terms of the two uncoupled levels b_0 and a_N, which
// W leaves out because their norms are conserved separately.
double hamiltonian(const SystemState& s, const ModelParams& params) {
  const std::size_t top = s.levels() - 1;
  const double free_lower = s.rho()[0] * s.rho()[0] + s.eta()[0] * s.eta()[0];
  const double free_upper = s.alpha()[top] * s.alpha()[top] + s.beta()[top] * s.beta()[top];
  return energy_W(s, params) + 0.5 * params.delta * (free_lower - free_upper);
}

double partial(const SystemState& s, const ModelParams& params, std::size_t i, double h = 1e-5) {
  SystemState up = s, down = s;
  up.coords()[i] += h;
  down.coords()[i] -= h;
  return (hamiltonian(up, params) - hamiltonian(down, params)) / (2.0 * h);
}

// Vector field obtained from the Hamiltonian alone: (x, p) canonical, each
// amplitude pair (re, im) evolving as d re = dH/d im / 2, d im = -dH/d re / 2.
std::vector<double> symplectic_field(const SystemState& s, const ModelParams& params) {
  const int n = s.truncation();
  std::vector<double> f(s.coords().size());
  f[Layout::x] = partial(s, params, Layout::p);
  f[Layout::p] = -partial(s, params, Layout::x);
  for (std::size_t k = 0; k < s.levels(); ++k) {
    const std::size_t a = Layout::alpha(n) + k, b = Layout::beta(n) + k;
    const std::size_t r = Layout::rho(n) + k, e = Layout::eta(n) + k;
    f[a] = 0.5 * partial(s, params, b);
    f[b] = -0.5 * partial(s, params, a);
    f[r] = 0.5 * partial(s, params, e);
    f[e] = -0.5 * partial(s, params, r);
  }
  return f;
}

SystemState shifted(const SystemState& s, const Derivative& d, double h) {
  SystemState out = s;
  for (std::size_t i = 0; i < out.coords().size(); ++i) out.coords()[i] += h * d.coords[i];
  return out;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("rhs is the symplectic gradient of the energy") {
  std::mt19937_64 rng(11);
  for (double delta : {0.0, 0.4, -1.3}) {
    const ModelParams params{0.001, delta, 12};
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = testing::random_state(rng, params.truncation);
      const auto d = rhs(s, params);
      const auto f = symplectic_field(s, params);
      for (std::size_t i = 0; i < f.size(); ++i) CHECK(d.coords[i] == doctest::Approx(f[i]).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("R_n and W are first integrals of the vector field") {
  std::mt19937_64 rng(12);
  const ModelParams params{0.001, 0.4, 20};
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testing::random_state(rng, params.truncation);
    const auto d = rhs(s, params);
    const auto r_up = integrals_Rn(shifted(s, d, h));
    const auto r_down = integrals_Rn(shifted(s, d, -h));
    for (std::size_t n = 0; n < r_up.size(); ++n) CHECK(std::abs(r_up[n] - r_down[n]) / (2 * h) < 1e-10);
    const double dw = (energy_W(shifted(s, d, h), params) - energy_W(shifted(s, d, -h), params)) / (2 * h);
    // W carries the kinetic term (up to ~0.45 here), so allow its rounding floor
    const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(energy_W(s, params)) / h;
    CHECK(std::abs(dw) < 1e-10 + rounding);
  }
}

TEST_CASE("empty cavity with ground-state atom only rotates b_0") {
  const ModelParams params{0.001, 0.4, 5};
  const auto s = init_state(0.2, 25.0, 0.0, AtomPrep{-1.0, 0.0}, params);
  const auto d = rhs(s, params);
  CHECK(d.dx() == doctest::Approx(0.025));
  CHECK(d.dp() == 0.0);
  CHECK(d.d_rho()[0] == 0.0);  // rho_0 = 1, eta_0 = 0
  CHECK(d.d_eta()[0] == doctest::Approx(-0.2));
  for (std::size_t i = 2; i < d.coords.size(); ++i) {
    if (i == Layout::eta(5)) continue;
    CHECK(d.coords[i] == 0.0);
  }
}

TEST_CASE("resonant excited atom feels no force") {
  const ModelParams params{0.001, 0.0, 100};
  const auto s = init_state(0.0, 25.0, 10.0, AtomPrep{}, params);
  CHECK(rhs(s, params).dp() == 0.0);

  // force-free along the whole trajectory, not just at the start
  IntegratorOptions opts;
  opts.sample_every = 0.5;
  const auto traj = integrate(s, params, opts, 60.0);
  for (const auto& sample : traj.samples) {
    CHECK(sample.p() == 25.0);
    CHECK(rhs(sample, params).dp() == 0.0);
  }
}

TEST_CASE("single-photon-pair Rabi system") {
  const ModelParams params{0.001, 0.7, 4};
  SystemState s(4);
  s.x() = 0.4;
  s.p() = 3.0;
  s.alpha()[0] = 0.5;
  s.beta()[0] = -0.3;
  s.rho()[1] = 0.6;
  s.eta()[1] = 0.2;
  const auto d = rhs(s, params);
  const double c = std::cos(0.4), half = 0.35;
  CHECK(d.d_alpha()[0] == doctest::Approx(-half * -0.3 - 0.2 * c));
  CHECK(d.d_beta()[0] == doctest::Approx(half * 0.5 + 0.6 * c));
  CHECK(d.d_rho()[1] == doctest::Approx(half * 0.2 + 0.3 * c));
  CHECK(d.d_eta()[1] == doctest::Approx(-half * 0.6 + 0.5 * c));
  CHECK(d.dp() == doctest::Approx(-2.0 * std::sin(0.4) * (0.5 * 0.6 + -0.3 * 0.2)));
  for (std::size_t n = 1; n <= 4; ++n) {
    CHECK(d.d_alpha()[n] == 0.0);
    CHECK(d.d_beta()[n] == 0.0);
  }
}

TEST_CASE("top level rotates by detuning only") {
  const ModelParams params{0.001, 0.4, 3};
  SystemState s(3);
  s.alpha()[3] = 0.6;
  s.beta()[3] = 0.8;
  const auto d = rhs(s, params);
  CHECK(d.d_alpha()[3] == doctest::Approx(-0.2 * 0.8));
  CHECK(d.d_beta()[3] == doctest::Approx(0.2 * 0.6));
}

TEST_CASE("rhs rejects mismatched truncation") {
  const SystemState s(5);
  CHECK_THROWS_AS(rhs(s, ModelParams{0.001, 0.4, 6}), std::invalid_argument);
}

TEST_CASE("integrals of the initial state") {
  const ModelParams params;
  const auto w = coherent_poisson_weights(10.0, params.truncation);
  const auto s = init_state(0.0, 25.0, w, AtomPrep{}, params);
  const auto r = integrals_Rn(s);
  REQUIRE(r.size() == 100);
  for (std::size_t n = 0; n < r.size(); ++n) CHECK(r[n] == w.amplitudes[n] * w.amplitudes[n]);
  for (double v : integrals_Rn(SystemState(5))) CHECK(v == 0.0);
}

TEST_CASE("energy of the initial state") {
  const ModelParams params;
  const auto s = init_state(0.0, 25.0, 10.0, AtomPrep{}, params);
  CHECK(energy_W(s, params) == doctest::Approx(0.001 * 625 / 2 - 0.2).epsilon(1e-14));
  CHECK(energy_W(SystemState(5), ModelParams{0.001, 0.4, 5}) == 0.0);
}

TEST_CASE("closed-form resonant solution") {
  const ModelParams params{0.001, 0.0, 100};
  const auto s0 = init_state(0.0, 25.0, 10.0, AtomPrep{}, params);

  SUBCASE("identity at tau = 0") { CHECK(analytic_zero_detuning(s0, params, 0.0) == s0); }

  SUBCASE("quantum part has period pi / kappa p0") {
    const double period = std::numbers::pi / (0.001 * 25.0);
    const auto s = analytic_zero_detuning(s0, params, period);
    CHECK(s.x() == doctest::Approx(std::numbers::pi));
    for (std::size_t i = Layout::amplitudes; i < s.coords().size(); ++i) {
      CHECK(std::abs(s.coords()[i] - s0.coords()[i]) < 1e-12);
    }
  }

  SUBCASE("inversion formula for x0 = 0") {
    const auto w = coherent_poisson_weights(10.0, 100);
    for (double tau : {3.0, 40.0, 77.7}) {
      const double theta = std::sin(0.025 * tau) / 0.025;
      double z = 0.0;
      for (int n = 0; n <= 99; ++n) z += w.amplitudes[n] * w.amplitudes[n] * std::cos(2.0 * std::sqrt(n + 1.0) * theta);
      z += w.amplitudes[100] * w.amplitudes[100];  // a_N has no partner
      CHECK(inversion(analytic_zero_detuning(s0, params, tau)) == doctest::Approx(z).epsilon(1e-12));
    }
  }

  SUBCASE("agrees with integration, including x0 != 0 and the lower family") {
    IntegratorOptions opts;
    for (const auto& [x0, z0] : {std::pair{0.0, 1.0}, std::pair{0.9, 1.0}, std::pair{-0.4, -1.0}}) {
      const auto init = init_state(x0, 25.0, 10.0, AtomPrep{z0, 0.0}, params);
      const auto traj = integrate(init, params, opts, 40.0);
      const auto exact = analytic_zero_detuning(init, params, 40.0);
      CHECK(testing::max_abs_diff(traj.samples.back(), exact) < 1e-7);
      CHECK(std::abs(inversion(traj.samples.back()) - inversion(exact)) < 1e-6);
    }
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(analytic_zero_detuning(s0, ModelParams{0.001, 0.4, 100}, 1.0), std::invalid_argument);
    auto still = s0;
    still.p() = 0.0;
    CHECK_THROWS_AS(analytic_zero_detuning(still, params, 1.0), std::invalid_argument);
    const auto mixed = init_state(0.0, 25.0, 10.0, AtomPrep{0.0, 0.0}, params);
    CHECK_THROWS_AS(analytic_zero_detuning(mixed, params, 1.0), std::invalid_argument);
  }
}

TEST_CASE("time reversal retraces the trajectory") {
  const ModelParams params;
  const auto s0 = init_state(0.0, 25.0, 10.0, AtomPrep{0.3, 0.5}, params);
  IntegratorOptions opts;
  opts.keep_samples = false;
  Propagator forward(s0, params, opts);
  const auto s1 = forward.advance_to(30.0);
  auto back = time_reversed(s1);
  back.tau = 0.0;
  Propagator backward(back, params, opts);
  auto s2 = time_reversed(backward.advance_to(30.0));
  s2.tau = 0.0;
  CHECK(testing::max_abs_diff(s2, s0) < 1e-7);
  CHECK(time_reversed(time_reversed(s1)) == s1);
}

}  // TEST_SUITE
