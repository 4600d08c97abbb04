#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cqed/experiments.hpp"

using namespace cqed;

namespace {

// Pearson correlation of explicitly supplied ranks.
double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("grid points") {
  const auto pts = Grid{-2.0, 2.0, 81, {}}.points();
  REQUIRE(pts.size() == 81);
  CHECK(pts.front() == -2.0);
  CHECK(pts.back() == 2.0);
  CHECK(pts[40] == doctest::Approx(0.0).scale(1.0));
  CHECK(pts[1] == doctest::Approx(-1.95));
  CHECK(Grid{3.0, 3.0, 1, {}}.points() == std::vector<double>{3.0});
  CHECK(Grid{0, 0, 0, {0.1, 0.7}}.points() == std::vector<double>{0.1, 0.7});
  CHECK_THROWS_AS(Grid({1.0, 0.0, 5, {}}).points(), std::invalid_argument);
}

TEST_CASE("grid point presets") {
  SweepSpec spec;
  CHECK(at_grid_point(spec, -0.7).model.delta == -0.7);
  spec.parameter = SweepParameter::p0;
  CHECK(at_grid_point(spec, 21.5).p0 == 21.5);
  spec.parameter = SweepParameter::z_in;
  CHECK(at_grid_point(spec, 0.3).prep.z0 == 0.3);
  CHECK(sweep_parameter_from_string("z_in") == SweepParameter::z_in);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (unsigned workers : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(57);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
    if (i == 6) throw std::runtime_error("boom");
  }),
                  std::runtime_error);
}

TEST_CASE("spearman correlation") {
  CHECK(spearman_correlation({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman_correlation({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman_correlation({1, 5, 2, 9}, {1, 25, 4, 81}) == doctest::Approx(1.0));
  // ties take the average rank
  const std::vector<double> a{1, 2, 2, 3, 7}, b{2, 1, 4, 3, 5};
  CHECK(spearman_correlation(a, b) == doctest::Approx(pearson({1, 2.5, 2.5, 4, 5}, {2, 1, 4, 3, 5})));
  CHECK_THROWS_AS(spearman_correlation({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("median absolute increment") {
  CHECK(median_abs_increment({0, 1, 3, 6}) == 2.0);
  CHECK(median_abs_increment({0, 1, 3, 6, 5}) == 1.5);
  CHECK_THROWS_AS(median_abs_increment({1.0}), std::invalid_argument);
}

TEST_CASE("resonant atoms fly through the cell ballistically") {
  Preset preset;
  preset.model.delta = 0.0;
  const IntegratorOptions integrator;

  const auto right = scatter_one(preset, integrator, 1000.0);
  CHECK(right.side == ExitSide::right);
  CHECK(right.turns == 0);
  CHECK(right.escape_time == doctest::Approx(right_node / 0.025).epsilon(1e-9));

  preset.p0 = -25.0;
  const auto left = scatter_one(preset, integrator, 1000.0);
  CHECK(left.side == ExitSide::left);
  CHECK(left.escape_time == doctest::Approx(-left_node / 0.025).epsilon(1e-9));

  preset.p0 = 0.01;
  const auto stuck = scatter_one(preset, integrator, 100.0);
  CHECK(stuck.side == ExitSide::trapped);
  CHECK_FALSE(stuck.escaped());
  CHECK(stuck.escape_time == 100.0);
}

TEST_CASE("scan records failures in-band") {
  Preset preset;
  IntegratorOptions integrator;
  const auto rows = inversion_map({0.5, 1.5, -0.5}, 5.0, preset, integrator, ExecutionOptions{2});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].error.empty());
  CHECK_FALSE(rows[1].error.empty());
  CHECK(rows[1].z_in == 1.5);
  CHECK(std::isnan(rows[1].z_out));
  CHECK(rows[2].z_in == -0.5);
  CHECK(rows[2].error.empty());
}

TEST_CASE("sweeps do not depend on the worker count") {
  SweepSpec spec;
  spec.grid = Grid{0.2, 0.6, 3, {}};
  LyapunovOptions opts;
  opts.transient = 5;
  opts.total_time = 45;
  opts.bootstrap_block = 5;
  const IntegratorOptions integrator;
  const auto one = sweep_lyapunov_vs_delta(spec, integrator, opts, ExecutionOptions{1});
  const auto three = sweep_lyapunov_vs_delta(spec, integrator, opts, ExecutionOptions{3});
  REQUIRE(one.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(one[i].delta == three[i].delta);
    CHECK(one[i].estimate.lambda == three[i].estimate.lambda);
    CHECK(one[i].estimate.std_error == three[i].estimate.std_error);
  }
  CHECK(one[1].delta == doctest::Approx(0.4));
}

TEST_CASE("purity series cover the window") {
  Preset preset;
  PurityVarianceOptions opts{Window{10.0, 30.0}, 0.5};
  const auto [p, s] = purity_entropy_series(preset, IntegratorOptions{}, opts);
  CHECK(p.taus().back() == doctest::Approx(30.0));
  CHECK(p.size() == s.size());
  CHECK(p.values().front() == doctest::Approx(1.0));
  for (double v : p.values()) CHECK(v >= 0.5 - 1e-12);
}

TEST_CASE("fidelity experiment stays near one for the unpolarized atom over a short run") {
  Preset preset;
  FidelityOptions opts;
  opts.tau_end = 60;
  opts.fit_window = Window{5, 50};
  opts.report_tau = 50;
  const auto runs = fidelity_decay_experiment(preset, {0.0, 1.0}, IntegratorOptions{}, opts);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].z0 == 0.0);
  CHECK(runs[1].z0 == 1.0);
  CHECK(runs[0].fidelity.values().front() == doctest::Approx(1.0));
  CHECK(runs[0].one_minus_f_at_report < 1e-6);
  CHECK(runs[0].fidelity.taus().back() == doctest::Approx(60.0));
}

}  // TEST_SUITE
