#pragma once

// The fdrelay command: flags to scenario, rows, and the output sink.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fdrelay/results.hpp"
#include "fdrelay/scenario.hpp"

namespace fdrelay::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;

struct RunRequest {
  Scenario scenario;  ///< id already final
  Sweep sweep;
  std::vector<RowMode> modes;
  std::vector<RowMethod> methods;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;
  bool timing = false;
  unsigned threads = 0;
};

struct RunOutcome {
  std::vector<ResultRow> rows;  ///< sorted
  bool converged = true;
};

/// Throws ConfigError when a sweep point leaves the parameter domain.
RunOutcome compute_rows(const RunRequest& req);

/// Entry point behind the fdrelay binary; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fdrelay::cli
