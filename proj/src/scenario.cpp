#include "fdrelay/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fdrelay/errors.hpp"

namespace fdrelay::cli {

namespace {

using nlohmann::json;
using relaysys::SystemConfig;

constexpr std::size_t kMaxSweepPoints = 100000;

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

// `prefix` is the key path of `obj`, e.g. "hop1_fading.".
double number_at(const json& obj, const std::string& key, std::string_view prefix) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + std::string(prefix) + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, std::string_view prefix) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + std::string(prefix) + key + "'");
  }
}

void require_keys(const json& obj, const std::set<std::string>& required, std::string_view prefix) {
  for (const auto& key : required) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + std::string(prefix) + key + "'");
  }
}

fading::AlphaMuParams read_fading(const json& obj, const std::string& key) {
  const std::string ctx = key + ".";
  if (!obj.is_object()) throw ConfigError("'" + key + "' must be an object");
  const std::set<std::string> keys = {"alpha", "mu", "r_hat"};
  reject_unknown(obj, keys, ctx);
  require_keys(obj, keys, ctx);
  return {number_at(obj, "alpha", ctx), number_at(obj, "mu", ctx), number_at(obj, "r_hat", ctx)};
}

Sweep read_sweep(const json& obj) {
  if (!obj.is_object()) throw ConfigError("'sweep' must be an object");
  const std::set<std::string> keys = {"parameter", "start", "stop", "step"};
  reject_unknown(obj, keys, "sweep.");
  require_keys(obj, keys, "sweep.");
  if (!obj.at("parameter").is_string()) throw ConfigError("'sweep.parameter' must be a string");
  Sweep s;
  s.param = parse_sweep_param(obj.at("parameter").get<std::string>());
  s.start = number_at(obj, "start", "sweep.");
  s.stop = number_at(obj, "stop", "sweep.");
  s.step = number_at(obj, "step", "sweep.");
  s.validate();
  return s;
}

SystemConfig preset_config(double alpha, double mu) {
  SystemConfig cfg;
  cfg.hop1_fading = {alpha, mu, 1.0};
  cfg.hop2_fading = {alpha, mu, 1.0};
  cfg.lbi_fading = {alpha, mu, 1.0};
  return cfg;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    parts.emplace_back(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) return parts;
    pos = next + 1;
  }
}

void validate_config(const SystemConfig& cfg) {
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::string_view sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::target_rate: return "target_rate";
    case SweepParam::source_power: return "source_power";
    case SweepParam::alpha: return "alpha";
    case SweepParam::mu: return "mu";
    case SweepParam::eh_time_fraction: return "eh_time_fraction";
  }
  return "";
}

SweepParam parse_sweep_param(std::string_view name) {
  for (SweepParam p : {SweepParam::target_rate, SweepParam::source_power, SweepParam::alpha,
                       SweepParam::mu, SweepParam::eh_time_fraction}) {
    if (sweep_param_name(p) == name) return p;
  }
  throw ConfigError("unknown sweep parameter '" + std::string(name) + "'");
}

std::vector<double> Sweep::values() const {
  validate();
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + 0.5 * step) break;
    out.push_back(v);
  }
  return out;
}

void Sweep::validate() const {
  const std::string name(sweep_param_name(param));
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw ConfigError("sweep " + name + ": bounds must be finite");
  }
  if (!(step > 0.0)) throw ConfigError("sweep " + name + ": step must be positive");
  if (start > stop) throw ConfigError("sweep " + name + ": empty range, start > stop");
  if ((stop - start) / step + 1.0 > static_cast<double>(kMaxSweepPoints)) {
    throw ConfigError("sweep " + name + ": more than 100000 points");
  }
}

Sweep parse_sweep(SweepParam param, std::string_view text) {
  const auto parts = split(text, ':');
  const std::string what = "sweep " + std::string(sweep_param_name(param));
  if (parts.size() != 3) throw ConfigError(what + ": expected start:stop:step, got '" + std::string(text) + "'");
  Sweep s{param, parse_number(parts[0], what), parse_number(parts[1], what), parse_number(parts[2], what)};
  s.validate();
  return s;
}

void apply_sweep_value(SystemConfig& cfg, SweepParam param, double value) {
  switch (param) {
    case SweepParam::target_rate: cfg.target_rate = value; break;
    case SweepParam::source_power: cfg.source_power = value; break;
    case SweepParam::eh_time_fraction: cfg.eh_time_fraction = value; break;
    // Hops only; the loop-back branch keeps its own parameters.
    case SweepParam::alpha: cfg.hop1_fading.alpha = cfg.hop2_fading.alpha = value; break;
    case SweepParam::mu: cfg.hop1_fading.mu = cfg.hop2_fading.mu = value; break;
  }
}

Scenario preset_scenario(std::string_view name) {
  Scenario sc;
  sc.id = std::string(name);
  if (name == "rayleigh") {
    sc.config = preset_config(2.0, 1.0);
  } else if (name == "weibull") {
    sc.config = preset_config(3.0, 1.0);
  } else if (name == "nakagami") {
    sc.config = preset_config(2.0, 2.0);
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected rayleigh, weibull or nakagami)");
  }
  return sc;
}

Scenario parse_scenario(std::string_view json_text, std::string_view source) {
  const std::string src(source);
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(src + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(src + ": top level must be an object");

  static const std::set<std::string> numbers = {
      "source_power",      "hop1_distance",        "hop2_distance",  "hop1_pathloss",
      "hop2_pathloss",     "noise_antenna_var",    "noise_conversion_var", "noise_dest_var",
      "eh_efficiency",     "eh_time_fraction",     "target_rate",    "block_time"};
  static const std::set<std::string> branches = {"hop1_fading", "hop2_fading", "lbi_fading"};
  std::set<std::string> allowed = numbers;
  allowed.insert(branches.begin(), branches.end());
  allowed.insert("sweep");
  const std::string ctx = src + ": ";

  Scenario sc;
  sc.id = "config=" + src;
  try {
    reject_unknown(doc, allowed, "");
    std::set<std::string> required = numbers;
    required.insert(branches.begin(), branches.end());
    required.erase("eh_time_fraction");
    required.erase("block_time");
    require_keys(doc, required, "");

    SystemConfig& c = sc.config;
    std::map<std::string, double*> fields = {
        {"source_power", &c.source_power},
        {"hop1_distance", &c.hop1_distance},
        {"hop2_distance", &c.hop2_distance},
        {"hop1_pathloss", &c.hop1_pathloss},
        {"hop2_pathloss", &c.hop2_pathloss},
        {"noise_antenna_var", &c.noise_antenna_var},
        {"noise_conversion_var", &c.noise_conversion_var},
        {"noise_dest_var", &c.noise_dest_var},
        {"eh_efficiency", &c.eh_efficiency},
        {"eh_time_fraction", &c.eh_time_fraction},
        {"target_rate", &c.target_rate},
        {"block_time", &c.block_time}};
    for (auto& [key, dst] : fields) {
      if (doc.contains(key)) *dst = number_at(doc, key, "");
    }
    c.hop1_fading = read_fading(doc.at("hop1_fading"), "hop1_fading");
    c.hop2_fading = read_fading(doc.at("hop2_fading"), "hop2_fading");
    c.lbi_fading = read_fading(doc.at("lbi_fading"), "lbi_fading");
    if (doc.contains("sweep")) sc.sweep = read_sweep(doc.at("sweep"));
    if (!doc.contains("eh_time_fraction")) {
      sc.warnings.push_back(ctx + "eh_time_fraction not set, using 0.5");
    }
    validate_config(c);
  } catch (const ConfigError& e) {
    throw ConfigError(ctx + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

void apply_overrides(Scenario& sc, const Overrides& ov) {
  SystemConfig& c = sc.config;
  if (ov.mu) c.hop1_fading.mu = c.hop2_fading.mu = c.lbi_fading.mu = *ov.mu;
  if (ov.eta) c.eh_time_fraction = *ov.eta;
  if (ov.rate) c.target_rate = *ov.rate;
  if (ov.power) c.source_power = *ov.power;
  if (ov.lbi_r_hat) c.lbi_fading.r_hat = *ov.lbi_r_hat;
  validate_config(c);
}

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string make_scenario_id(std::string_view base, const Overrides& ov, SweepParam sweep) {
  std::string id(base);
  auto add = [&](const char* key, const std::optional<double>& v) {
    if (v) id += std::string(";") + key + "=" + format_shortest(*v);
  };
  add("mu", ov.mu);
  add("eta", ov.eta);
  add("rate", ov.rate);
  add("power", ov.power);
  add("lbi_r_hat", ov.lbi_r_hat);
  id += ";sweep=" + std::string(sweep_param_name(sweep));
  return id;
}

IdentifiedConfig scenario_from_id(std::string_view id) {
  const auto parts = split(id, ';');
  const std::string& base = parts.front();
  Scenario sc = base.rfind("config=", 0) == 0 ? load_scenario(base.substr(7)) : preset_scenario(base);
  Overrides ov;
  std::optional<SweepParam> sweep;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ConfigError("scenario id: malformed entry '" + parts[i] + "'");
    const std::string key = parts[i].substr(0, eq);
    const std::string value = parts[i].substr(eq + 1);
    if (key == "sweep") {
      sweep = parse_sweep_param(value);
      continue;
    }
    const double v = parse_number(value, "scenario id " + key);
    if (key == "mu") ov.mu = v;
    else if (key == "eta") ov.eta = v;
    else if (key == "rate") ov.rate = v;
    else if (key == "power") ov.power = v;
    else if (key == "lbi_r_hat") ov.lbi_r_hat = v;
    else throw ConfigError("scenario id: unknown key '" + key + "'");
  }
  if (!sweep) throw ConfigError("scenario id: missing sweep parameter");
  apply_overrides(sc, ov);
  return {sc.config, *sweep};
}

}  // namespace fdrelay::cli
