#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "cqed/state.hpp"

namespace cqed::testing {

/// Random state with every coordinate drawn from N(0, 1), amplitudes
/// rescaled to unit norm. x, p are uniform on a period / [-30, 30].
inline SystemState random_state(std::mt19937_64& rng, int truncation) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SystemState s(truncation);
  for (double& v : s.coords()) v = gauss(rng);
  double sum = 0.0;
  for (std::size_t i = Layout::amplitudes; i < s.coords().size(); ++i) sum += s.coords()[i] * s.coords()[i];
  const double scale = 1.0 / std::sqrt(sum);
  for (std::size_t i = Layout::amplitudes; i < s.coords().size(); ++i) s.coords()[i] *= scale;
  s.x() = 2.0 * std::numbers::pi * unit(rng);
  s.p() = -30.0 + 60.0 * unit(rng);
  return s;
}

inline double max_abs_diff(const SystemState& a, const SystemState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coords().size(); ++i) m = std::max(m, std::abs(a.coords()[i] - b.coords()[i]));
  return m;
}

}  // namespace cqed::testing
