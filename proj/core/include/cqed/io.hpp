#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/chaos.hpp"
#include "cqed/experiments.hpp"
#include "cqed/integrator.hpp"
#include "cqed/observables.hpp"
#include "cqed/state.hpp"

namespace cqed::io {

inline constexpr int manifest_schema_version = 1;

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// Strict inverse of format_double; the whole string must be consumed.
double parse_double(std::string_view text);

/// JSON snapshot {"tau", "x", "p", "N", "alpha", "beta", "rho", "eta"}.
/// Doubles are written round-trip exact.
std::string state_to_json(const SystemState& state);
SystemState state_from_json(std::string_view json);

/// Little-endian binary snapshot: magic "CQS1", int32 N, then tau, x, p and
/// the four amplitude blocks as IEEE-754 doubles.
std::vector<std::byte> state_to_bytes(const SystemState& state);
SystemState state_from_bytes(std::span<const std::byte> bytes);

/// 64-bit FNV-1a digest as 16 lowercase hex digits.
std::string digest_hex(std::string_view text);

/// "<experiment>-<digest of spec>"
std::string artifact_stem(std::string_view experiment, std::string_view canonical_spec);

/// Columns tau,x,p,z,P,S,W,norm.
std::string trajectory_csv(const Trajectory& traj, const ModelParams& params);

/// Columns tau,value.
std::string series_csv(const ObservableSeries& series);

/// Metadata sidecar for a series file: observable name, preset hash, extras.
std::string series_sidecar_json(const ObservableSeries& series, std::string_view preset_hash,
                                std::string_view extra_json_object = "{}");

std::string lyapunov_estimate_json(const Preset& preset, const LyapunovEstimate& estimate,
                                   const LyapunovOptions& opts);

/// delta,lambda,std_error,converged,sigma_P,sigma_S,mean_P,error
std::string delta_sweep_csv(const std::vector<LyapunovRecord>& lyapunov,
                            const std::vector<PurityVarianceRecord>& purity);
/// p0,T,m,side,error
std::string scatter_csv(const std::vector<ScatterRecord>& records);
/// p0,x,error
std::string position_csv(const std::vector<PositionRecord>& records);
/// z_in,z_out,error
std::string inversion_csv(const std::vector<InversionRecord>& records);
/// z0,rate,log10_slope,goodness,fit_begin,fit_end,one_minus_f_at_report,error
std::string fidelity_summary_csv(const std::vector<FidelityRun>& runs);

}  // namespace cqed::io
