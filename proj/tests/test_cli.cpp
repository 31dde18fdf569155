#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "fdrelay/outage.hpp"
#include "fdrelay/run.hpp"

using namespace fdrelay;
using namespace fdrelay::cli;
using relaysys::SystemConfig;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fdrelay");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string preset_path(const std::string& name) { return std::string(FDRELAY_PRESET_DIR) + "/" + name + ".json"; }

bool same_branch(const fading::AlphaMuParams& a, const fading::AlphaMuParams& b) {
  return a.alpha == b.alpha && a.mu == b.mu && a.r_hat == b.r_hat;
}

bool same_config(const SystemConfig& a, const SystemConfig& b) {
  return a.source_power == b.source_power && a.hop1_distance == b.hop1_distance &&
         a.hop2_distance == b.hop2_distance && a.hop1_pathloss == b.hop1_pathloss &&
         a.hop2_pathloss == b.hop2_pathloss && same_branch(a.hop1_fading, b.hop1_fading) &&
         same_branch(a.hop2_fading, b.hop2_fading) && same_branch(a.lbi_fading, b.lbi_fading) &&
         a.noise_antenna_var == b.noise_antenna_var && a.noise_conversion_var == b.noise_conversion_var &&
         a.noise_dest_var == b.noise_dest_var && a.eh_efficiency == b.eh_efficiency &&
         a.eh_time_fraction == b.eh_time_fraction && a.target_rate == b.target_rate &&
         a.block_time == b.block_time;
}

const char* kMinimal = R"({
  "source_power": 1, "hop1_distance": 5, "hop2_distance": 5,
  "hop1_pathloss": 2, "hop2_pathloss": 2,
  "hop1_fading": {"alpha": 2, "mu": 1, "r_hat": 1},
  "hop2_fading": {"alpha": 2, "mu": 1, "r_hat": 1},
  "lbi_fading": {"alpha": 2, "mu": 1, "r_hat": 1},
  "noise_antenna_var": 5e-5, "noise_conversion_var": 5e-5, "noise_dest_var": 1e-4,
  "eh_efficiency": 1, "target_rate": 1
})";

std::string with_replaced(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("preset files match the built-in presets") {
    for (const auto& name : preset_names()) {
      const Scenario file = load_scenario(preset_path(name));
      const Scenario builtin = preset_scenario(name);
      INFO(name);
      CHECK(same_config(file.config, builtin.config));
      CHECK(file.warnings.empty());
      CHECK_FALSE(file.sweep);
    }
  }

  TEST_CASE("preset values") {
    const SystemConfig r = preset_scenario("rayleigh").config;
    CHECK(r.hop1_distance == 5.0);
    CHECK(r.hop2_pathloss == 2.0);
    CHECK(r.noise_dest_var == 1e-4);
    CHECK(r.relay_noise_var() == doctest::Approx(1e-4).epsilon(1e-15));
    CHECK(r.noise_antenna_var == r.noise_conversion_var);
    CHECK(r.eh_efficiency == 1.0);
    for (auto [name, alpha, mu] : {std::tuple{"rayleigh", 2.0, 1.0}, {"weibull", 3.0, 1.0}, {"nakagami", 2.0, 2.0}}) {
      const SystemConfig c = preset_scenario(name).config;
      for (const auto& b : {c.hop1_fading, c.hop2_fading, c.lbi_fading}) {
        CHECK(b.alpha == alpha);
        CHECK(b.mu == mu);
        CHECK(b.r_hat == 1.0);
      }
    }
    CHECK_THROWS_AS(preset_scenario("rician"), ConfigError);
  }

  TEST_CASE("sweep grammar") {
    CHECK(parse_sweep(SweepParam::target_rate, "0.5:6:0.5").values().size() == 12);
    CHECK(parse_sweep(SweepParam::target_rate, "0.5:6:0.5").values().back() == 6.0);
    CHECK(parse_sweep(SweepParam::target_rate, "0:1:0.3").values() == std::vector<double>{0.0, 0.3, 0.6, 0.8999999999999999});
    // Within half a step of the end counts as reaching it.
    CHECK(parse_sweep(SweepParam::target_rate, "0:1:0.34").values().size() == 4);
    CHECK(parse_sweep(SweepParam::alpha, "2:2:1").values() == std::vector<double>{2.0});
    for (const char* bad : {"1:0:1", "0:1:0", "0:1:-1", "0:1", "a:1:1", "0:1:1:2", "0:inf:1", ""}) {
      INFO(bad);
      CHECK_THROWS_AS(parse_sweep(SweepParam::target_rate, bad), ConfigError);
    }
    CHECK_THROWS_AS(parse_sweep(SweepParam::target_rate, "0:1e9:1e-3"), ConfigError);
  }

  TEST_CASE("sweep values land on the right field") {
    SystemConfig c;
    apply_sweep_value(c, SweepParam::alpha, 3.5);
    CHECK((c.hop1_fading.alpha == 3.5 && c.hop2_fading.alpha == 3.5 && c.lbi_fading.alpha == 2.0));
    apply_sweep_value(c, SweepParam::mu, 2.5);
    CHECK((c.hop1_fading.mu == 2.5 && c.hop2_fading.mu == 2.5 && c.lbi_fading.mu == 1.0));
    Scenario sc = preset_scenario("weibull");
    Overrides ov;
    ov.mu = 1.5;
    apply_overrides(sc, ov);
    CHECK((sc.config.hop1_fading.mu == 1.5 && sc.config.lbi_fading.mu == 1.5 && sc.config.lbi_fading.alpha == 3.0));
    apply_sweep_value(c, SweepParam::source_power, 7.0);
    apply_sweep_value(c, SweepParam::target_rate, 2.0);
    apply_sweep_value(c, SweepParam::eh_time_fraction, 0.3);
    CHECK((c.source_power == 7.0 && c.target_rate == 2.0 && c.eh_time_fraction == 0.3));
  }

  TEST_CASE("strict schema") {
    const Scenario ok = parse_scenario(kMinimal, "min.json");
    CHECK(ok.config.eh_time_fraction == 0.5);
    CHECK(ok.config.block_time == 1.0);
    REQUIRE(ok.warnings.size() == 1);
    CHECK(ok.warnings[0].find("eh_time_fraction") != std::string::npos);

    auto rejects = [](const std::string& text, const std::string& needle) {
      INFO(needle);
      CHECK_THROWS_WITH_AS(parse_scenario(text, "x.json"), doctest::Contains(needle.c_str()), ConfigError);
    };
    rejects(with_replaced(kMinimal, "\"target_rate\": 1", "\"target_rate\": 1, \"colour\": 3"), "colour");
    rejects(with_replaced(kMinimal, "\"r_hat\": 1},\n  \"hop2", "\"r_hat\": 1, \"k\": 0},\n  \"hop2"), "hop1_fading.k");
    rejects(with_replaced(kMinimal, "\"target_rate\": 1", "\"target_rat\": 1"), "target_rat");
    rejects(with_replaced(kMinimal, "\"mu\": 1, \"r_hat\": 1},\n  \"hop2", "\"mu\": 0.3, \"r_hat\": 1},\n  \"hop2"),
            "hop1_fading");
    rejects(with_replaced(kMinimal, "\"source_power\": 1", "\"source_power\": \"1\""), "source_power");
    rejects(with_replaced(kMinimal, "\"target_rate\": 1", "\"target_rate\": 1,"), "line 9");
    rejects("[1, 2]", "object");
    rejects(with_replaced(kMinimal, "\"target_rate\": 1",
                          "\"target_rate\": 1, \"sweep\": {\"parameter\": \"mu\", \"start\": 1, \"stop\": 0, \"step\": 1}"),
            "empty range");
    CHECK_THROWS_AS(load_scenario("/nonexistent/cfg.json"), ConfigError);
  }

  TEST_CASE("sweep section in a scenario file") {
    const Scenario sc = parse_scenario(with_replaced(kMinimal, "\"target_rate\": 1",
                                                     "\"target_rate\": 1, \"sweep\": {\"parameter\": "
                                                     "\"eh_time_fraction\", \"start\": 0.1, \"stop\": 0.9, \"step\": 0.2}"));
    REQUIRE(sc.sweep);
    CHECK(sc.sweep->param == SweepParam::eh_time_fraction);
    CHECK(sc.sweep->values().size() == 5);
  }

  TEST_CASE("scenario ids rebuild the config") {
    Overrides ov;
    ov.mu = 2.0;
    ov.eta = 0.4;
    ov.lbi_r_hat = 0.1;
    const std::string id = make_scenario_id("weibull", ov, SweepParam::source_power);
    CHECK(id == "weibull;mu=2;eta=0.4;lbi_r_hat=0.1;sweep=source_power");
    Scenario sc = preset_scenario("weibull");
    apply_overrides(sc, ov);
    const IdentifiedConfig back = scenario_from_id(id);
    CHECK(same_config(back.config, sc.config));
    CHECK(back.sweep_param == SweepParam::source_power);

    const std::string file_id = make_scenario_id("config=" + preset_path("nakagami"), {}, SweepParam::alpha);
    CHECK(same_config(scenario_from_id(file_id).config, preset_scenario("nakagami").config));
    CHECK_THROWS_AS(scenario_from_id("rayleigh;mu=2"), ConfigError);
    CHECK_THROWS_AS(scenario_from_id("rayleigh;colour=2;sweep=mu"), ConfigError);
    CHECK_THROWS_AS(scenario_from_id("rayleigh;mu=0.2;sweep=mu"), ConfigError);
  }
}

TEST_SUITE("results") {
  TEST_CASE("CSV layout and round trip") {
    const ResultRow r{"rayleigh;sweep=target_rate", 0.1, RowMode::af, RowMethod::high_snr, 1.0 / 3.0, 1e-15, 0, 42, 0.0};
    std::ostringstream out;
    write_csv(out, {r});
    const std::string text = out.str();
    CHECK(text.substr(0, text.find('\n')) == kCsvHeader);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("0.33333333333333331") != std::string::npos);

    std::vector<ResultRow> rows = {r, r, r};
    rows[1].scenario_id = "config=/tmp/a,b \"q\".json;sweep=mu";
    rows[1].outage = 0.1 + 0.2;
    rows[1].n_samples = 1000000;
    rows[2].method = RowMethod::mc;
    rows[2].runtime_ms = 12.5;
    std::ostringstream csv, js;
    write_csv(csv, rows);
    write_json(js, rows);
    std::istringstream csv_in(csv.str()), js_in(js.str());
    CHECK(read_csv(csv_in) == rows);
    CHECK(read_json(js_in) == rows);
  }

  TEST_CASE("row ordering") {
    std::vector<ResultRow> rows;
    for (double x : {2.0, 1.0}) {
      for (RowMethod m : {RowMethod::high_snr, RowMethod::mc, RowMethod::analytic}) {
        for (RowMode mode : {RowMode::af, RowMode::df}) rows.push_back({"s", x, mode, m});
      }
    }
    sort_rows(rows);
    CHECK(rows.front().sweep_value == 1.0);
    CHECK(rows[0].mode == RowMode::df);
    CHECK(rows[0].method == RowMethod::analytic);
    CHECK(rows[1].method == RowMethod::mc);
    CHECK(rows[2].method == RowMethod::high_snr);
    CHECK(rows[3].mode == RowMode::af);
  }
}

TEST_SUITE("run") {
  TEST_CASE("rate sweep with analytic and Monte Carlo rows") {
    const auto res = invoke({"--preset", "rayleigh", "--mode", "df", "--method", "both", "--rate-sweep",
                             "0.5:6:0.5", "--samples", "100000"});
    REQUIRE(res.code == kExitOk);
    std::istringstream in(res.out);
    const auto rows = read_csv(in);
    REQUIRE(rows.size() == 24);
    for (std::size_t i = 0; i < rows.size(); i += 2) {
      const ResultRow& a = rows[i];
      const ResultRow& m = rows[i + 1];
      REQUIRE(a.method == RowMethod::analytic);
      REQUIRE(m.method == RowMethod::mc);
      CHECK(a.sweep_value == m.sweep_value);
      CHECK(a.n_samples == 0);
      CHECK(m.n_samples == 100000);
      CHECK(a.scenario_id == "rayleigh;sweep=target_rate");
      // Standard error under the analytic value, so a p_hat of exactly 0 or 1 is judged fairly.
      const double se = std::sqrt(a.outage * (1.0 - a.outage) / 100000.0);
      INFO("R=" << a.sweep_value);
      CHECK(std::abs(a.outage - m.outage) <= 3.0 * se + 1e-12);
    }
  }

  TEST_CASE("every analytic row can be regenerated from its fields") {
    const auto res = invoke({"--preset", "nakagami", "--mu", "1.5", "--eta", "0.3", "--power-sweep", "1:10:3"});
    REQUIRE(res.code == kExitOk);
    std::istringstream in(res.out);
    const auto rows = read_csv(in);
    REQUIRE(rows.size() == 8);
    for (const auto& r : rows) {
      IdentifiedConfig ic = scenario_from_id(r.scenario_id);
      apply_sweep_value(ic.config, ic.sweep_param, r.sweep_value);
      const double v = r.mode == RowMode::df ? outage::outage_df(ic.config).value : outage::outage_af(ic.config).value;
      CHECK(v == r.outage);
    }
  }

  TEST_CASE("high-SNR rows and JSON output") {
    const auto res = invoke({"--preset", "weibull", "--method", "high-snr", "--power-sweep", "10:30:10", "--format", "json"});
    REQUIRE(res.code == kExitOk);
    std::istringstream in(res.out);
    const auto rows = read_json(in);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) CHECK(r.method == RowMethod::high_snr);
    CHECK(rows[0].outage == rows[1].outage);
  }

  TEST_CASE("output is identical across runs and thread counts") {
    const std::vector<std::string> args = {"--config", preset_path("weibull"), "--method", "analytic,mc",
                                           "--alpha-sweep", "1:4:1", "--samples", "50000", "--seed", "7"};
    auto with_threads = [&](const char* t) {
      auto a = args;
      a.insert(a.end(), {"--threads", t});
      return invoke(a);
    };
    const auto a = with_threads("1");
    REQUIRE(a.code == kExitOk);
    CHECK(invoke(args).out == a.out);
    CHECK(with_threads("3").out == a.out);
    CHECK(a.out.find(",0\n") != std::string::npos);  // runtime_ms stays 0 without --timing
  }

  TEST_CASE("writes to --out") {
    const std::string path = "test_cli_out.csv";
    const auto res = invoke({"--preset", "rayleigh", "--out", path});
    REQUIRE(res.code == kExitOk);
    CHECK(res.out.empty());
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    std::remove(path.c_str());
  }

  TEST_CASE("config errors exit with 2 and emit nothing") {
    const std::vector<std::vector<std::string>> bad = {
        {"--preset", "rician"},
        {"--config", "/nonexistent.json"},
        {},
        {"--preset", "rayleigh", "--alpha-sweep", "0:2:0.5"},
        {"--preset", "rayleigh", "--rate-sweep", "3:1:1"},
        {"--preset", "rayleigh", "--method", "mc", "--samples", "100"},
        {"--preset", "rayleigh", "--method", "exact"},
        {"--preset", "rayleigh", "--mode", "hybrid"},
        {"--preset", "rayleigh", "--mu", "0.3"},
        {"--preset", "rayleigh", "--eta", "1"},
        {"--preset", "rayleigh", "--format", "xml"},
        {"--preset", "rayleigh", "--bogus"},
        {"--preset", "rayleigh", "--config", preset_path("rayleigh")},
        {"--preset", "rayleigh", "--rate-sweep", "1:2:1", "--power-sweep", "1:2:1"},
    };
    for (const auto& args : bad) {
      const auto res = invoke(args);
      INFO(res.err);
      CHECK(res.code == kExitConfig);
      CHECK(res.out.empty());
      CHECK_FALSE(res.err.empty());
    }
  }

  TEST_CASE("missing eta is warned about on stderr") {
    const std::string path = "test_cli_min.json";
    std::ofstream(path) << kMinimal;
    const auto res = invoke({"--config", path});
    CHECK(res.code == kExitOk);
    CHECK(res.err.find("warning") != std::string::npos);
    CHECK(res.err.find("eh_time_fraction") != std::string::npos);
    std::remove(path.c_str());
  }
}
