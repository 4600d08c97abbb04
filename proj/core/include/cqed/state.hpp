#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cqed {

/// Dimensionless control parameters of the atom-field system.
///
/// kappa is the recoil frequency (hbar k^2 / m Omega0), delta the atom-field
/// detuning in units of Omega0, truncation the highest retained Fock index N.
struct ModelParams {
  double kappa = 0.001;
  double delta = 0.4;
  int truncation = 100;

  bool operator==(const ModelParams&) const = default;
};

/// Throws std::invalid_argument on hard violations; returns soft warnings
/// (kappa not small compared to one).
std::vector<std::string> validate(const ModelParams& params);

/// Internal atomic preparation: z0 = |c_a|^2 - |c_b|^2 and the relative phase
/// of the lower-level amplitude.
struct AtomPrep {
  double z0 = 1.0;
  double relative_phase = 0.0;

  bool operator==(const AtomPrep&) const = default;
};

void validate(const AtomPrep& prep);

/// Field amplitudes c_n over the Fock basis, n = 0..N, and the probability
/// mass that the truncation discards.
struct FieldWeights {
  std::vector<double> amplitudes;
  double tail_mass = 0.0;

  static constexpr double warning_threshold = 1e-6;
  bool truncation_warning() const { return tail_mass > warning_threshold; }
};

/// Coherent-state amplitudes c_n = exp(-nbar/2) nbar^(n/2) / sqrt(n!).
///
/// Evaluated in log space. The tail mass is summed directly over n > N so it
/// stays meaningful far below double epsilon.
FieldWeights coherent_poisson_weights(double nbar, int truncation);

/// Single Fock state |n>.
FieldWeights fock_weights(int photons, int truncation);

/// Offsets of the blocks inside the flat coordinate vector
/// [x, p, alpha(0..N), beta(0..N), rho(0..N), eta(0..N)].
struct Layout {
  static constexpr std::size_t x = 0;
  static constexpr std::size_t p = 1;
  static constexpr std::size_t amplitudes = 2;

  static constexpr std::size_t levels(int truncation) { return static_cast<std::size_t>(truncation) + 1; }
  static constexpr std::size_t size(int truncation) { return amplitudes + 4 * levels(truncation); }
  static constexpr std::size_t alpha(int) { return amplitudes; }
  static constexpr std::size_t beta(int truncation) { return amplitudes + levels(truncation); }
  static constexpr std::size_t rho(int truncation) { return amplitudes + 2 * levels(truncation); }
  static constexpr std::size_t eta(int truncation) { return amplitudes + 3 * levels(truncation); }
};

/// Read-only view of a state laid out per Layout. Cheap to copy.
class StateView {
 public:
  StateView(double tau, std::span<const double> coords, int truncation);

  double tau() const { return tau_; }
  int truncation() const { return truncation_; }
  std::size_t levels() const { return Layout::levels(truncation_); }

  double x() const { return coords_[Layout::x]; }
  double p() const { return coords_[Layout::p]; }
  std::span<const double> alpha() const { return block(Layout::alpha(truncation_)); }
  std::span<const double> beta() const { return block(Layout::beta(truncation_)); }
  std::span<const double> rho() const { return block(Layout::rho(truncation_)); }
  std::span<const double> eta() const { return block(Layout::eta(truncation_)); }
  std::span<const double> coords() const { return coords_; }

 private:
  std::span<const double> block(std::size_t offset) const { return coords_.subspan(offset, levels()); }

  double tau_;
  std::span<const double> coords_;
  int truncation_;
};

/// Snapshot of the classical pair (x, p) and the complex amplitudes
/// a_n = alpha_n + i beta_n (upper level), b_n = rho_n + i eta_n (lower level).
///
/// Amplitudes are four contiguous real arrays indexed by photon number n;
/// b_0 is stored like every other entry.
class SystemState {
 public:
  SystemState() = default;
  explicit SystemState(int truncation);
  SystemState(double tau, std::vector<double> coords, int truncation);

  double tau = 0.0;

  int truncation() const { return truncation_; }
  std::size_t levels() const { return Layout::levels(truncation_); }

  double x() const { return coords_[Layout::x]; }
  double p() const { return coords_[Layout::p]; }
  double& x() { return coords_[Layout::x]; }
  double& p() { return coords_[Layout::p]; }

  std::span<const double> alpha() const { return block(Layout::alpha(truncation_)); }
  std::span<const double> beta() const { return block(Layout::beta(truncation_)); }
  std::span<const double> rho() const { return block(Layout::rho(truncation_)); }
  std::span<const double> eta() const { return block(Layout::eta(truncation_)); }
  std::span<double> alpha() { return block(Layout::alpha(truncation_)); }
  std::span<double> beta() { return block(Layout::beta(truncation_)); }
  std::span<double> rho() { return block(Layout::rho(truncation_)); }
  std::span<double> eta() { return block(Layout::eta(truncation_)); }

  std::span<const double> coords() const { return coords_; }
  std::span<double> coords() { return coords_; }

  StateView view() const { return {tau, coords_, truncation_}; }
  operator StateView() const { return view(); }  // NOLINT(google-explicit-constructor)

  bool operator==(const SystemState&) const = default;

 private:
  std::span<const double> block(std::size_t offset) const {
    return std::span<const double>(coords_).subspan(offset, levels());
  }
  std::span<double> block(std::size_t offset) { return std::span<double>(coords_).subspan(offset, levels()); }

  int truncation_ = 0;
  std::vector<double> coords_;
};

/// Product state: classical (x0, p0), field amplitudes c_n, atom
/// sqrt((1+z0)/2)|2> + exp(i phi) sqrt((1-z0)/2)|1>.
SystemState init_state(double x0, double p0, const FieldWeights& field, const AtomPrep& prep,
                       const ModelParams& params);

/// Coherent field with mean photon number nbar.
SystemState init_state(double x0, double p0, double nbar, const AtomPrep& prep, const ModelParams& params);

/// Sum over n of |a_n|^2 + |b_n|^2.
double norm2(StateView state);

/// Throws std::invalid_argument unless all entries are finite and
/// norm2 <= 1 + 1e-12.
void validate(StateView state);

}  // namespace cqed
