#pragma once

// Result rows and their CSV / JSON serialization.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fdrelay::cli {

enum class RowMode { df, af };
enum class RowMethod { analytic, mc, high_snr };

std::string_view mode_name(RowMode m);
std::string_view method_name(RowMethod m);

struct ResultRow {
  std::string scenario_id;
  double sweep_value = 0.0;
  RowMode mode = RowMode::df;
  RowMethod method = RowMethod::analytic;
  double outage = 0.0;
  double err = 0.0;  ///< quadrature error estimate, or MC standard error
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "scenario_id,sweep_value,mode,method,outage,err,n_samples,seed,runtime_ms";

/// Sweep value, then mode (df, af), then method (analytic, mc, high_snr).
void sort_rows(std::vector<ResultRow>& rows);

/// Numbers carry 17 significant digits.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_json(std::ostream& out, const std::vector<ResultRow>& rows);

std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_json(std::istream& in);

}  // namespace fdrelay::cli
