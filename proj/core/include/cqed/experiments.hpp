#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cqed/chaos.hpp"
#include "cqed/integrator.hpp"
#include "cqed/observables.hpp"
#include "cqed/state.hpp"

namespace cqed {

/// Model parameters plus the initial-condition block shared by every
/// experiment. Defaults are the standard chaotic-walking setup: atom excited,
/// x0 = 0, p0 = 25, coherent field with nbar = 10, kappa = 0.001.
struct Preset {
  ModelParams model;
  double x0 = 0.0;
  double p0 = 25.0;
  double nbar = 10.0;
  AtomPrep prep;

  bool operator==(const Preset&) const = default;
};

void validate(const Preset& preset);
SystemState prepare(const Preset& preset);

/// Evenly spaced grid, or an explicit list when `values` is non-empty.
struct Grid {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  std::vector<double> values;

  std::vector<double> points() const;
  bool operator==(const Grid&) const = default;
};

enum class SweepParameter { delta, p0, z_in };

const char* to_string(SweepParameter parameter);
SweepParameter sweep_parameter_from_string(const std::string& name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::delta;
  Grid grid;
  Preset preset;
};

/// Preset with the swept parameter set to `value`.
Preset at_grid_point(const SweepSpec& spec, double value);

/// Grid points are independent work items. Results are ordered by grid
/// index whatever the worker count.
struct ExecutionOptions {
  unsigned workers = 1;
};

/// Runs task(i) for i in [0, count) on at most `workers` threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task);

struct LyapunovRecord {
  double delta = 0.0;
  LyapunovEstimate estimate;
  std::string error;  ///< non-empty when this grid point failed
};

std::vector<LyapunovRecord> sweep_lyapunov_vs_delta(const SweepSpec& spec, const IntegratorOptions& integrator,
                                                    const LyapunovOptions& opts, const ExecutionOptions& exec = {});

inline constexpr double missing = std::numeric_limits<double>::quiet_NaN();

struct PurityVarianceRecord {
  double delta = 0.0;
  double sigma_purity = missing;
  double sigma_entropy = missing;
  double mean_purity = missing;
  std::string error;
};

struct PurityVarianceOptions {
  Window window{50.0, 500.0};
  double sample_dt = 0.25;

  bool operator==(const PurityVarianceOptions&) const = default;
};

/// Purity and entropy series of one run, sampled every options.sample_dt up
/// to the end of the window.
std::pair<ObservableSeries, ObservableSeries> purity_entropy_series(const Preset& preset,
                                                                    const IntegratorOptions& integrator,
                                                                    const PurityVarianceOptions& options);

std::vector<PurityVarianceRecord> sweep_purity_variance_vs_delta(const SweepSpec& spec,
                                                                 const IntegratorOptions& integrator,
                                                                 const PurityVarianceOptions& options,
                                                                 const ExecutionOptions& exec = {});

enum class ExitSide { left, right, trapped };

const char* to_string(ExitSide side);

/// Exit nodes of the one-wavelength cavity around x0 = 0.
inline constexpr double left_node = -1.5707963267948966;  // -pi/2
inline constexpr double right_node = 4.7123889803846897;  // 3 pi/2

struct ScatterRecord {
  double p0 = 0.0;
  double escape_time = 0.0;  ///< tau at the exit node, or tau_max when trapped
  int turns = 0;             ///< momentum sign changes before exit
  ExitSide side = ExitSide::trapped;
  std::string error;

  bool escaped() const { return side != ExitSide::trapped && error.empty(); }
};

/// Flies one atom from x0 until it crosses an exit node or tau_max.
ScatterRecord scatter_one(const Preset& preset, const IntegratorOptions& integrator, double tau_max);

std::vector<ScatterRecord> scattering_scan(const std::vector<double>& p0_grid, const Preset& preset,
                                           const IntegratorOptions& integrator, double tau_max,
                                           const ExecutionOptions& exec = {});

/// Bisects toward a boundary between two escape classes. `inside` and
/// `outside` must differ in (side, turns); each level halves the bracket and
/// the record nearest the boundary on the `inside` class is appended.
std::vector<ScatterRecord> refine_escape_endpoint(const ScatterRecord& inside, const ScatterRecord& outside,
                                                  const Preset& preset, const IntegratorOptions& integrator,
                                                  double tau_max, int levels);

struct PositionRecord {
  double p0 = 0.0;
  double x = missing;
  std::string error;
};

std::vector<PositionRecord> position_sensitivity_scan(const std::vector<double>& p0_grid, double tau_snap,
                                                      const Preset& preset, const IntegratorOptions& integrator,
                                                      const ExecutionOptions& exec = {});

struct InversionRecord {
  double z_in = 0.0;
  double z_out = missing;
  std::string error;
};

std::vector<InversionRecord> inversion_map(const std::vector<double>& z_in_grid, double tau_snap,
                                           const Preset& preset, const IntegratorOptions& integrator,
                                           const ExecutionOptions& exec = {});

struct FidelityOptions {
  double ddelta = 1e-4;
  double tau_end = 300.0;
  Window fit_window{20.0, 250.0};
  /// Fit only while 1 - f stays below this (exponential-growth stage).
  double saturation = 0.1;
  double sample_dt = 1.0;
  double report_tau = 250.0;

  bool operator==(const FidelityOptions&) const = default;
};

struct FidelityRun {
  double z0 = 0.0;
  ObservableSeries fidelity{"fidelity"};
  ObservableSeries log10_infidelity{"log10_one_minus_f"};
  ObservableSeries separation_x{"x_separation"};
  DecayFit fit;                 ///< DecayScale::separation over the growth stage
  Window fitted{0.0, 0.0};      ///< window actually used by the fit
  double one_minus_f_at_report = 0.0;
  std::string error;
};

/// Co-integrates the delta and delta + ddelta systems from the same initial
/// state for every z0, recording f(tau) over the quantum amplitudes.
std::vector<FidelityRun> fidelity_decay_experiment(const Preset& preset, const std::vector<double>& z0_list,
                                                   const IntegratorOptions& integrator,
                                                   const FidelityOptions& options,
                                                   const ExecutionOptions& exec = {});

// Dataset analysis helpers.

/// Spearman rank correlation with average ranks for ties.
double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Median of |v[i+1] - v[i]|.
double median_abs_increment(const std::vector<double>& v);

}  // namespace cqed
