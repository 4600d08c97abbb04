#pragma once

#include <string>
#include <vector>

#include "cqed/config.hpp"

namespace cqed {

/// Environment variable that overrides the default worker count.
inline constexpr const char* workers_env_var = "CQED_WORKERS";

/// Worker count for a run: explicit value if non-zero, else $CQED_WORKERS,
/// else the available hardware parallelism.
unsigned resolve_workers(unsigned requested);

struct RunResult {
  std::vector<std::string> files;  ///< paths written, data files first
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
};

/// Output directory missing or not writable; nothing was written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dispatches to the experiment driver and writes <stem>.csv, <stem>.json and
/// any per-series files into config.output_dir. Files are only created once
/// the computation has finished; on a write failure every file of the run is
/// removed again.
RunResult run(const RunConfig& config);

}  // namespace cqed
