#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cqed/chaos.hpp"

using namespace cqed;

namespace {

SystemState start(double delta, double z0 = 1.0) {
  return init_state(0.0, 25.0, 10.0, AtomPrep{z0, 0.0}, ModelParams{0.001, delta, 100});
}

LyapunovOptions short_run() {
  LyapunovOptions opts;
  opts.transient = 10.0;
  opts.total_time = 310.0;
  opts.bootstrap_block = 20;
  opts.bootstrap_resamples = 100;
  return opts;
}

}  // namespace

TEST_SUITE("chaos") {

TEST_CASE("predictability horizon") {
  CHECK(predictability_horizon(0.04, 1.0, 1e-3) == doctest::Approx(std::log(1000.0) / 0.04));
  CHECK_THROWS_AS(predictability_horizon(0.0, 1.0, 1e-3), std::domain_error);
  CHECK_THROWS_AS(predictability_horizon(-0.1, 1.0, 1e-3), std::domain_error);
  CHECK_THROWS_AS(predictability_horizon(0.04, 1e-3, 1.0), std::invalid_argument);
}

TEST_CASE("decay fit recovers synthetic rates") {
  ObservableSeries expo("f"), super("f");
  for (int i = 0; i <= 200; ++i) {
    const double t = i;
    expo.push(t, std::exp(-0.03 * t));
    super.push(t, std::exp(-1e-8 * std::exp(2.0 * 0.045 * t)));
  }
  const auto lin = fit_decay_rate(expo, Window{10, 150});
  CHECK(lin.rate == doctest::Approx(0.03).epsilon(1e-10));
  CHECK(lin.goodness == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lin.samples == 141);

  const auto sep = fit_decay_rate(super, Window{0, 150}, DecayScale::separation);
  CHECK(sep.rate == doctest::Approx(0.045).epsilon(1e-8));
}

TEST_CASE("decay fit rejects unusable data") {
  ObservableSeries f("f");
  f.push(0, 1.0);
  f.push(1, 0.5);
  f.push(2, 0.0);
  CHECK_THROWS_AS(fit_decay_rate(f, Window{0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate(f, Window{0, 1}, DecayScale::separation), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate(f, Window{0.5, 0.7}), std::invalid_argument);
}

TEST_CASE("option strings round-trip") {
  for (auto t : {PerturbationTarget::position, PerturbationTarget::momentum, PerturbationTarget::full_state}) {
    CHECK(perturbation_target_from_string(to_string(t)) == t);
  }
  for (auto m : {DistanceMetric::full_state, DistanceMetric::position}) {
    CHECK(distance_metric_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(distance_metric_from_string("manhattan"), std::invalid_argument);
}

TEST_CASE("option validation") {
  LyapunovOptions o;
  CHECK_NOTHROW(validate(o));
  o.d0 = 0.0;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
  o = {};
  o.total_time = o.transient;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
}

TEST_CASE("Lyapunov estimate is reproducible and separates regimes") {
  const IntegratorOptions integrator;
  const auto opts = short_run();
  const auto chaotic = max_lyapunov(start(0.4), ModelParams{0.001, 0.4, 100}, integrator, opts);
  const auto again = max_lyapunov(start(0.4), ModelParams{0.001, 0.4, 100}, integrator, opts);
  CHECK(chaotic.lambda == again.lambda);
  CHECK(chaotic.std_error == again.std_error);
  CHECK(chaotic.renormalizations == 310);

  const auto resonant = max_lyapunov(start(0.0), ModelParams{0.001, 0.0, 100}, integrator, opts);
  // a 300-unit run still carries the ln(t)/t bias of linear separation growth
  CHECK(chaotic.lambda > 0.02);
  CHECK(resonant.lambda < 0.5 * chaotic.lambda);
  CHECK(chaotic.std_error > 0.0);
  CHECK(chaotic.lambda == doctest::Approx(0.5 * (chaotic.first_half + chaotic.second_half)).epsilon(1e-9));
}

TEST_CASE("position metric and momentum kick are available") {
  auto opts = short_run();
  opts.total_time = 110.0;
  opts.metric = DistanceMetric::position;
  opts.target = PerturbationTarget::momentum;
  const auto est = max_lyapunov(start(0.4), ModelParams{0.001, 0.4, 100}, IntegratorOptions{}, opts);
  CHECK(std::isfinite(est.lambda));
  CHECK(est.renormalizations == 110);
}

}  // TEST_SUITE
