#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "cqed/dynamics.hpp"
#include "cqed/observables.hpp"
#include "support.hpp"

using namespace cqed;
using cplx = std::complex<double>;

namespace {

// Two-row amplitude matrix: row 0 holds a_n, row 1 holds b_n.
Eigen::MatrixXcd amplitude_matrix(const SystemState& s) {
  Eigen::MatrixXcd m(2, s.levels());
  for (std::size_t n = 0; n < s.levels(); ++n) {
    m(0, n) = cplx(s.alpha()[n], s.beta()[n]);
    m(1, n) = cplx(s.rho()[n], s.eta()[n]);
  }
  return m;
}

Eigen::Matrix2cd reduced(const SystemState& s) {
  const auto m = amplitude_matrix(s);
  return m * m.adjoint();
}

double entropy_of_purity(double purity) {
  const double r = std::sqrt(std::max(0.0, 2.0 * purity - 1.0));
  double s = 0.0;
  for (double l : {(1 + r) / 2, (1 - r) / 2}) {
    if (l > 0) s -= l * std::log(l);
  }
  return s;
}

cplx overlap(const SystemState& a, const SystemState& b) {
  const auto ma = amplitude_matrix(a), mb = amplitude_matrix(b);
  return (ma.conjugate().cwiseProduct(mb)).sum();
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("inversion of prepared states") {
  const ModelParams params;
  for (double z0 : {-1.0, -0.25, 0.0, 0.6, 1.0}) {
    const auto s = init_state(0.0, 25.0, 10.0, AtomPrep{z0, 0.3}, params);
    CHECK(inversion(s) == doctest::Approx(z0).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("reduced density matches the explicit partial trace") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto s = testing::random_state(rng, 8);
    const auto r = reduced_density(s);
    const auto m = reduced(s);
    CHECK(r.p22 == doctest::Approx(m(0, 0).real()).epsilon(1e-13));
    CHECK(r.p11 == doctest::Approx(m(1, 1).real()).epsilon(1e-13));
    CHECK(std::abs(r.coherence - m(0, 1)) < 1e-13);
    CHECK(r.trace_of_square() == doctest::Approx((m * m).trace().real()).epsilon(1e-13));
  }
}

TEST_CASE("amplitude-sum purity equals Tr(rho_a^2)") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 2000; ++i) {
    const auto s = testing::random_state(rng, 1 + static_cast<int>(i % 30));
    const auto m = reduced(s);
    const double want = (m * m).trace().real();
    CHECK(std::abs(purity_raw(s) - want) < 1e-12);
    const double p = purity(s);
    CHECK(p >= 0.5 - 1e-15);
    CHECK(p <= 1.0 + 1e-15);
  }
}

TEST_CASE("product states are pure whatever the relative phase") {
  const ModelParams params;
  for (double phi : {0.0, 0.5 * std::numbers::pi, 2.0}) {
    for (double z0 : {-0.5, 0.0, 0.9}) {
      const auto s = init_state(0.0, 25.0, 10.0, AtomPrep{z0, phi}, params);
      CHECK(purity(s) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(entropy(s) < 1e-6);
    }
  }
}

TEST_CASE("entropy from the eigenvalues") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    const auto s = testing::random_state(rng, 6);
    const Eigen::Matrix2cd m = reduced(s) / reduced(s).trace().real();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(m);
    double want = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double l = eig.eigenvalues()[k];
      if (l > 1e-15) want -= l * std::log(l);
    }
    CHECK(std::abs(entropy(s) - want) < 1e-10);
    CHECK(std::abs(entropy(s) - entropy_of_purity(purity(s))) < 1e-10);
  }
}

TEST_CASE("maximally mixed atom") {
  SystemState s(3);
  s.alpha()[0] = std::sqrt(0.5);
  s.rho()[1] = std::sqrt(0.5);
  CHECK(purity(s) == doctest::Approx(0.5));
  CHECK(entropy(s) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("fidelity is the squared overlap of the quantum parts") {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 500; ++i) {
    const auto a = testing::random_state(rng, 9);
    const auto b = testing::random_state(rng, 9);
    const double f = fidelity(a, b);
    CHECK(f == doctest::Approx(std::norm(overlap(a, b))).epsilon(1e-12));
    CHECK(f == doctest::Approx(fidelity(b, a)).epsilon(1e-14));
    CHECK(f <= norm2(a) * norm2(b) + 1e-14);
    CHECK(fidelity(a, a) == doctest::Approx(norm2(a) * norm2(a)));
    CHECK(normalized_fidelity(a, a) == doctest::Approx(1.0));
  }
}

TEST_CASE("fidelity ignores the classical coordinates") {
  std::mt19937_64 rng(25);
  auto a = testing::random_state(rng, 4);
  auto b = a;
  b.x() += 1.0;
  b.p() = -b.p();
  CHECK(fidelity(a, b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fidelity(a, SystemState(5)), std::invalid_argument);
}

TEST_CASE("series must be strictly increasing in time") {
  ObservableSeries s("purity");
  s.push(0.0, 1.0);
  s.push(0.5, 0.9);
  CHECK_THROWS_AS(s.push(0.5, 0.8), std::invalid_argument);
  CHECK(s.size() == 2);
  CHECK(s.name() == "purity");
}

TEST_CASE("series variance over a window") {
  ObservableSeries s("v");
  for (int i = 0; i <= 100; ++i) s.push(i, std::sin(0.3 * i));
  double sum = 0.0, sq = 0.0;
  int count = 0;
  for (int i = 20; i <= 60; ++i) {
    sum += std::sin(0.3 * i);
    sq += std::sin(0.3 * i) * std::sin(0.3 * i);
    ++count;
  }
  const double mean = sum / count;
  CHECK(series_variance(s, Window{20, 60}) == doctest::Approx(std::sqrt(sq / count - mean * mean)).epsilon(1e-12));
  CHECK_THROWS_AS(series_variance(s, Window{20.5, 20.7}), std::invalid_argument);

  ObservableSeries flat("c");
  for (int i = 0; i < 10; ++i) flat.push(i, 0.75);
  CHECK(series_variance(flat, Window{0, 9}) == 0.0);
}

}  // TEST_SUITE
