#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "cqed/state.hpp"

namespace cqed {

/// Population inversion: sum |a_n|^2 - sum |b_n|^2, b_0 included.
double inversion(StateView state);

/// Reduced atomic density matrix in the {|2>, |1>} basis.
struct ReducedDensity {
  double p22 = 0.0;                  ///< upper-level population
  double p11 = 0.0;                  ///< lower-level population
  std::complex<double> coherence{};  ///< <2|rho_a|1> = sum a_n conj(b_n)

  double trace() const { return p22 + p11; }
  /// Tr(rho_a^2) without renormalization.
  double trace_of_square() const { return p22 * p22 + p11 * p11 + 2.0 * std::norm(coherence); }
  /// Eigenvalues of rho_a / Tr(rho_a), larger first.
  std::pair<double, double> normalized_eigenvalues() const;
};

ReducedDensity reduced_density(StateView state);

/// Purity from the amplitude sums without forming rho_a and without
/// renormalization; equals Tr(rho_a^2) for any state.
double purity_raw(StateView state);

/// Purity of rho_a / Tr(rho_a); in [1/2, 1] for any nonzero state.
double purity(StateView state);

/// Von Neumann entropy -Tr(r ln r) of r = rho_a / Tr(rho_a).
/// Eigenvalues <= 1e-15 contribute nothing.
double entropy(StateView state);

/// |<psi1|psi2>|^2 over the quantum amplitudes; (x, p) do not enter.
/// Throws std::invalid_argument on truncation mismatch.
double fidelity(StateView first, StateView second);

/// fidelity divided by both squared norms.
double normalized_fidelity(StateView first, StateView second);

/// Named scalar time series with strictly increasing sample times.
class ObservableSeries {
 public:
  ObservableSeries() = default;
  explicit ObservableSeries(std::string name) : name_(std::move(name)) {}
  ObservableSeries(std::string name, std::vector<double> taus, std::vector<double> values);

  void push(double tau, double value);

  const std::string& name() const { return name_; }
  const std::vector<double>& taus() const { return taus_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return taus_.size(); }
  bool empty() const { return taus_.empty(); }

 private:
  std::string name_;
  std::vector<double> taus_;
  std::vector<double> values_;
};

struct Window {
  double begin = 0.0;
  double end = 0.0;

  bool contains(double tau) const { return tau >= begin && tau <= end; }
  bool operator==(const Window&) const = default;
};

/// Root-mean-square deviation sqrt(<v^2> - <v>^2) over samples in the window,
/// unweighted. Throws std::invalid_argument with fewer than two samples.
double series_variance(const ObservableSeries& series, Window window);

}  // namespace cqed
