#include "fdrelay/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "fdrelay/errors.hpp"

namespace fdrelay::mcsim {

namespace {

using relaysys::SystemConfig;

std::uint64_t combine(std::uint64_t h, std::uint64_t x) {
  return detail::splitmix64(h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

struct Counts {
  std::uint64_t df = 0;
  std::uint64_t af = 0;
};

// Runs ceil(n / kBlockSize) blocks over a worker pool. Block b draws from
// mt19937_64(combine(key, b)); per-block counts are summed in block order.
template <bool WantDf, bool WantAf>
Counts run_blocks(const SystemConfig& cfg, std::uint64_t n, std::uint64_t key, unsigned threads) {
  const relaysys::DerivedConstants dc = relaysys::derive_constants(cfg);
  const std::uint64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<Counts> per_block(n_blocks);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (std::uint64_t b = next++; b < n_blocks; b = next++) {
      std::mt19937_64 rng(combine(key, b));
      // Fresh samplers per block: the gamma sampler carries internal state.
      fading::EnvelopeSampler s1(cfg.hop1_fading), s2(cfg.hop2_fading), s3(cfg.lbi_fading);
      const std::uint64_t len = std::min(kBlockSize, n - b * kBlockSize);
      Counts c;
      for (std::uint64_t i = 0; i < len; ++i) {
        const double x1 = s1.power(rng);
        const double x2 = s2.power(rng);
        const double v = s3.power(rng);
        const double z = x1 * x2;
        if constexpr (WantDf) c.df += relaysys::snr_df_eff(dc, z, v) < dc.nu;
        if constexpr (WantAf) c.af += relaysys::snr_af(dc, z, v) < dc.nu;
      }
      per_block[b] = c;
    }
  };

  unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::uint64_t>(t, n_blocks));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < t; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  Counts total;
  for (const auto& c : per_block) {
    total.df += c.df;
    total.af += c.af;
  }
  return total;
}

void check_samples(std::uint64_t n) {
  if (n < kMinSamples) throw DomainError("mcsim: need at least 10^4 samples");
}

std::uint64_t stream_key(std::uint64_t seed, const SystemConfig& cfg, std::uint64_t occurrence) {
  return combine(combine(detail::splitmix64(seed), detail::config_fingerprint(cfg)), occurrence);
}

McEstimate simulate_keyed(const SystemConfig& cfg, Mode mode, std::uint64_t n, std::uint64_t seed,
                          std::uint64_t occurrence, const McOptions& opts) {
  std::uint64_t key = stream_key(seed, cfg, occurrence);
  if (!opts.common_random_numbers) key = combine(key, mode == Mode::df ? 1 : 2);
  const Counts c = mode == Mode::df ? run_blocks<true, false>(cfg, n, key, opts.threads)
                                    : run_blocks<false, true>(cfg, n, key, opts.threads);
  return make_estimate(mode == Mode::df ? c.df : c.af, n, seed);
}

}  // namespace

namespace detail {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t config_fingerprint(const SystemConfig& cfg) {
  const double fields[] = {
      cfg.source_power,       cfg.hop1_distance,       cfg.hop2_distance,     cfg.hop1_pathloss,
      cfg.hop2_pathloss,      cfg.hop1_fading.alpha,   cfg.hop1_fading.mu,    cfg.hop1_fading.r_hat,
      cfg.hop2_fading.alpha,  cfg.hop2_fading.mu,      cfg.hop2_fading.r_hat, cfg.lbi_fading.alpha,
      cfg.lbi_fading.mu,      cfg.lbi_fading.r_hat,    cfg.noise_antenna_var, cfg.noise_conversion_var,
      cfg.noise_dest_var,     cfg.eh_efficiency,       cfg.eh_time_fraction,  cfg.target_rate,
      cfg.block_time};
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (double f : fields) h = combine(h, std::bit_cast<std::uint64_t>(f + 0.0));  // -0 == +0
  return h;
}

}  // namespace detail

Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
  if (n == 0 || hits > n) throw DomainError("wilson_interval: need 0 <= hits <= n, n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + 0.5 * z2 / nn) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + 0.25 * z2 / (nn * nn));
  // Rounding can push the bounds past p at hits = 0 or n.
  return {std::clamp(std::min(center - half, p), 0.0, 1.0),
          std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

McEstimate make_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed) {
  McEstimate e;
  e.n_samples = n;
  e.seed = seed;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n));
  const Interval ci = wilson_interval(hits, n);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  return e;
}

McEstimate simulate_outage(const SystemConfig& cfg, Mode mode, std::uint64_t n, std::uint64_t seed,
                           const McOptions& opts) {
  check_samples(n);
  cfg.validate();
  return simulate_keyed(cfg, mode, n, seed, 0, opts);
}

ModePair simulate_both(const SystemConfig& cfg, std::uint64_t n, std::uint64_t seed,
                       const McOptions& opts) {
  check_samples(n);
  cfg.validate();
  if (!opts.common_random_numbers) {
    return {simulate_keyed(cfg, Mode::df, n, seed, 0, opts), simulate_keyed(cfg, Mode::af, n, seed, 0, opts)};
  }
  const Counts c = run_blocks<true, true>(cfg, n, stream_key(seed, cfg, 0), opts.threads);
  return {make_estimate(c.df, n, seed), make_estimate(c.af, n, seed)};
}

std::vector<McEstimate> simulate_sweep(const std::vector<SystemConfig>& grid, Mode mode,
                                       std::uint64_t n, std::uint64_t seed, const McOptions& opts) {
  if (grid.empty()) throw DomainError("simulate_sweep: empty grid");
  check_samples(n);
  for (const auto& cfg : grid) cfg.validate();
  std::map<std::uint64_t, std::uint64_t> seen;
  std::vector<McEstimate> out;
  out.reserve(grid.size());
  for (const auto& cfg : grid) {
    const std::uint64_t occurrence = seen[detail::config_fingerprint(cfg)]++;
    out.push_back(simulate_keyed(cfg, mode, n, seed, occurrence, opts));
  }
  return out;
}

}  // namespace fdrelay::mcsim
