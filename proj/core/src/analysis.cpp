#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cqed/experiments.hpp"

namespace cqed {
namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("rank correlation needs two equal-length series of at least two points");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double median_abs_increment(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("increments need at least two values");
  std::vector<double> inc(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) inc[i] = std::abs(v[i + 1] - v[i]);
  const std::size_t mid = inc.size() / 2;
  std::nth_element(inc.begin(), inc.begin() + static_cast<std::ptrdiff_t>(mid), inc.end());
  if (inc.size() % 2 == 1) return inc[mid];
  const double upper = inc[mid];
  const double lower = *std::max_element(inc.begin(), inc.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace cqed
