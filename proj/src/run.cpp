#include "fdrelay/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "fdrelay/errors.hpp"
#include "fdrelay/mcsim.hpp"
#include "fdrelay/outage.hpp"

namespace fdrelay::cli {

namespace {

using relaysys::SystemConfig;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<RowMode> parse_modes(const std::string& s) {
  if (s == "df") return {RowMode::df};
  if (s == "af") return {RowMode::af};
  if (s == "both") return {RowMode::df, RowMode::af};
  throw ConfigError("--mode: expected df, af or both, got '" + s + "'");
}

// "analytic", "mc", "high-snr", "both" (analytic and mc), or a comma list.
std::vector<RowMethod> parse_methods(const std::string& s) {
  std::vector<RowMethod> out;
  auto add = [&](RowMethod m) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  };
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "analytic") {
      add(RowMethod::analytic);
    } else if (item == "mc") {
      add(RowMethod::mc);
    } else if (item == "high-snr" || item == "high_snr") {
      add(RowMethod::high_snr);
    } else if (item == "both") {
      add(RowMethod::analytic);
      add(RowMethod::mc);
    } else {
      throw ConfigError("--method: unknown method '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--method: empty");
  return out;
}

bool has(const std::vector<RowMethod>& v, RowMethod m) {
  return std::find(v.begin(), v.end(), m) != v.end();
}

bool has(const std::vector<RowMode>& v, RowMode m) { return std::find(v.begin(), v.end(), m) != v.end(); }

struct PointRows {
  std::vector<ResultRow> rows;
  bool converged = true;
};

PointRows compute_point(const RunRequest& req, const SystemConfig& cfg, double x) {
  PointRows out;
  auto row = [&](RowMode mode, RowMethod method) {
    ResultRow r;
    r.scenario_id = req.scenario.id;
    r.sweep_value = x;
    r.mode = mode;
    r.method = method;
    r.seed = req.seed;
    return r;
  };

  if (has(req.methods, RowMethod::analytic)) {
    for (RowMode mode : req.modes) {
      ResultRow r = row(mode, RowMethod::analytic);
      const auto t0 = Clock::now();
      try {
        const outage::OutageResult res = mode == RowMode::df ? outage::outage_df(cfg) : outage::outage_af(cfg);
        r.outage = res.value;
        r.err = res.numeric_error;
        out.converged = out.converged && res.converged;
      } catch (const ConvergenceError& e) {
        r.outage = NAN;
        r.err = e.error_estimate();
        out.converged = false;
      }
      if (req.timing) r.runtime_ms = elapsed_ms(t0);
      out.rows.push_back(r);
    }
  }

  if (has(req.methods, RowMethod::mc)) {
    mcsim::McOptions opts;
    opts.threads = req.threads;
    const auto t0 = Clock::now();
    std::optional<mcsim::McEstimate> df, af;
    if (has(req.modes, RowMode::df) && has(req.modes, RowMode::af)) {
      const mcsim::ModePair p = mcsim::simulate_both(cfg, req.samples, req.seed, opts);
      df = p.df;
      af = p.af;
    } else if (has(req.modes, RowMode::df)) {
      df = mcsim::simulate_outage(cfg, mcsim::Mode::df, req.samples, req.seed, opts);
    } else {
      af = mcsim::simulate_outage(cfg, mcsim::Mode::af, req.samples, req.seed, opts);
    }
    const double ms = req.timing ? elapsed_ms(t0) : 0.0;
    for (auto [mode, est] : {std::pair{RowMode::df, df}, {RowMode::af, af}}) {
      if (!est) continue;
      ResultRow r = row(mode, RowMethod::mc);
      r.outage = est->p_hat;
      r.err = est->std_error;
      r.n_samples = est->n_samples;
      r.runtime_ms = ms;
      out.rows.push_back(r);
    }
  }

  if (has(req.methods, RowMethod::high_snr)) {
    const auto t0 = Clock::now();
    const outage::OutageResult res = outage::outage_high_snr(cfg);
    const double ms = req.timing ? elapsed_ms(t0) : 0.0;
    for (RowMode mode : req.modes) {
      ResultRow r = row(mode, RowMethod::high_snr);
      r.outage = res.value;
      r.err = res.numeric_error;
      r.runtime_ms = ms;
      out.rows.push_back(r);
    }
  }
  return out;
}

}  // namespace

RunOutcome compute_rows(const RunRequest& req) {
  if (req.modes.empty() || req.methods.empty()) throw ConfigError("nothing to compute");
  if (has(req.methods, RowMethod::mc) && req.samples < mcsim::kMinSamples) {
    throw ConfigError("--samples: at least 10000 required");
  }
  // Check every point before computing any, so a bad sweep emits nothing.
  std::vector<std::pair<double, SystemConfig>> points;
  for (double x : req.sweep.values()) {
    SystemConfig cfg = req.scenario.config;
    apply_sweep_value(cfg, req.sweep.param, x);
    try {
      cfg.validate();
      fading::ProductDistParams{cfg.hop1_fading, cfg.hop2_fading}.validate();
    } catch (const DomainError& e) {
      throw ConfigError("sweep " + std::string(sweep_param_name(req.sweep.param)) + " = " +
                        format_shortest(x) + ": " + e.what());
    }
    points.emplace_back(x, cfg);
  }

  RunOutcome out;
  for (const auto& [x, cfg] : points) {
    PointRows p = compute_point(req, cfg, x);
    out.converged = out.converged && p.converged;
    out.rows.insert(out.rows.end(), p.rows.begin(), p.rows.end());
  }
  sort_rows(out.rows);
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outage probability of a full-duplex energy-harvesting relay link"};
  app.name("fdrelay");

  std::string config_path, preset, mode = "both", method = "analytic", format = "csv", out_path;
  std::string rate_sweep, power_sweep, alpha_sweep;
  Overrides ov;
  double mu = 0, eta = 0, rate = 0, power = 0, lbi_r_hat = 0;
  std::uint64_t samples = 1000000, seed = 42;
  unsigned threads = 0;
  bool timing = false;

  auto* cfg_opt = app.add_option("--config", config_path, "Scenario JSON file");
  auto* preset_opt = app.add_option("--preset", preset, "rayleigh, weibull or nakagami");
  cfg_opt->excludes(preset_opt);
  app.add_option("--mode", mode, "df, af or both")->capture_default_str();
  app.add_option("--method", method, "analytic, mc, high-snr, both, or a comma list")->capture_default_str();
  auto* rs = app.add_option("--rate-sweep", rate_sweep, "Target rate sweep start:stop:step");
  auto* ps = app.add_option("--power-sweep", power_sweep, "Source power sweep start:stop:step");
  auto* as = app.add_option("--alpha-sweep", alpha_sweep, "Alpha sweep on both hops start:stop:step");
  rs->excludes(ps)->excludes(as);
  ps->excludes(as);
  auto* mu_opt = app.add_option("--mu", mu, "mu on all three branches");
  auto* eta_opt = app.add_option("--eta", eta, "Energy-harvesting time fraction");
  auto* rate_opt = app.add_option("--rate", rate, "Target rate, bits/s/Hz");
  auto* power_opt = app.add_option("--power", power, "Source power, W");
  auto* lbi_opt = app.add_option("--lbi-r-hat", lbi_r_hat, "r_hat of the loop-back channel");
  app.add_option("--samples", samples, "Monte Carlo samples per point")->capture_default_str();
  app.add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--threads", threads, "Monte Carlo worker threads, 0 for all cores")->capture_default_str();
  app.add_option("--format", format, "csv or json")->capture_default_str();
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_flag("--timing", timing, "Fill runtime_ms (output is then no longer reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (cfg_opt->count() == 0 && preset_opt->count() == 0) throw ConfigError("one of --config or --preset is required");
    if (format != "csv" && format != "json") throw ConfigError("--format: expected csv or json");

    RunRequest req;
    req.scenario = cfg_opt->count() ? load_scenario(config_path) : preset_scenario(preset);
    for (const auto& w : req.scenario.warnings) err << "warning: " << w << '\n';
    const std::string base = req.scenario.id;

    if (mu_opt->count()) ov.mu = mu;
    if (eta_opt->count()) ov.eta = eta;
    if (rate_opt->count()) ov.rate = rate;
    if (power_opt->count()) ov.power = power;
    if (lbi_opt->count()) ov.lbi_r_hat = lbi_r_hat;
    apply_overrides(req.scenario, ov);

    if (rs->count()) {
      req.sweep = parse_sweep(SweepParam::target_rate, rate_sweep);
    } else if (ps->count()) {
      req.sweep = parse_sweep(SweepParam::source_power, power_sweep);
    } else if (as->count()) {
      req.sweep = parse_sweep(SweepParam::alpha, alpha_sweep);
    } else if (req.scenario.sweep) {
      req.sweep = *req.scenario.sweep;
    } else {
      const double r = req.scenario.config.target_rate;
      req.sweep = {SweepParam::target_rate, r, r, 1.0};
    }
    req.scenario.id = make_scenario_id(base, ov, req.sweep.param);
    req.modes = parse_modes(mode);
    req.methods = parse_methods(method);
    req.samples = samples;
    req.seed = seed;
    req.timing = timing;
    req.threads = threads;

    const RunOutcome res = compute_rows(req);

    std::ostringstream buf;
    if (format == "csv") {
      write_csv(buf, res.rows);
    } else {
      write_json(buf, res.rows);
    }
    if (out_path.empty()) {
      out << buf.str() << std::flush;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!(f << buf.str())) throw ConfigError("--out: cannot write '" + out_path + "'");
    }
    if (!res.converged) {
      err << "error: numerical evaluation did not converge for at least one row\n";
      return kExitNonConvergence;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace fdrelay::cli
