#pragma once

// Monte Carlo outage estimates from sampled channel triples.
//
// Samples are drawn in fixed blocks, each with its own generator keyed by
// (seed, config fingerprint, occurrence, block), so the result does not depend
// on how many worker threads run the blocks.

#include <cstdint>
#include <vector>

#include "fdrelay/relaysys.hpp"

namespace fdrelay::mcsim {

enum class Mode { df, af };

struct McEstimate {
  double p_hat = 0.0;
  std::uint64_t n_samples = 0;
  double std_error = 0.0;  ///< sqrt(p_hat (1 - p_hat) / n)
  double ci_low = 0.0;     ///< 95% Wilson interval
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

struct McOptions {
  unsigned threads = 0;  ///< 0 picks std::thread::hardware_concurrency()
  /// Reuse the same channel draws for DF and AF on one config. When off, the
  /// mode is mixed into the stream key.
  bool common_random_numbers = true;
};

struct ModePair {
  McEstimate df;
  McEstimate af;
};

inline constexpr std::uint64_t kMinSamples = 10000;
inline constexpr std::uint64_t kBlockSize = std::uint64_t{1} << 16;

/// Fraction of n draws with effective SNR strictly below nu. n >= 10^4.
McEstimate simulate_outage(const relaysys::SystemConfig& cfg, Mode mode, std::uint64_t n,
                           std::uint64_t seed, const McOptions& opts = {});

/// DF and AF from one shared set of draws.
ModePair simulate_both(const relaysys::SystemConfig& cfg, std::uint64_t n, std::uint64_t seed,
                       const McOptions& opts = {});

/// One estimate per grid entry. Streams are keyed by config content and by how
/// many identical configs precede the entry, so permuting the grid permutes
/// the results and a grid of one equals simulate_outage.
std::vector<McEstimate> simulate_sweep(const std::vector<relaysys::SystemConfig>& grid, Mode mode,
                                       std::uint64_t n, std::uint64_t seed,
                                       const McOptions& opts = {});

struct Interval {
  double low;
  double high;
};

inline constexpr double kZ95 = 1.959963984540054;

Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = kZ95);

/// Estimate with standard error and Wilson interval from raw counts.
McEstimate make_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed);

namespace detail {

std::uint64_t splitmix64(std::uint64_t x);

/// Hash of every field of the config, by bit pattern.
std::uint64_t config_fingerprint(const relaysys::SystemConfig& cfg);

}  // namespace detail

}  // namespace fdrelay::mcsim
