#include "fdrelay/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <tuple>

#include "json.hpp"

#include "fdrelay/scenario.hpp"

namespace fdrelay::cli {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one CSV record; quoted fields may contain commas and doubled quotes.
std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("results: bad number '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("results: bad integer '" + s + "'");
  return v;
}

RowMode parse_mode(std::string_view s) {
  if (s == "df") return RowMode::df;
  if (s == "af") return RowMode::af;
  throw ConfigError("results: bad mode '" + std::string(s) + "'");
}

RowMethod parse_method(std::string_view s) {
  for (RowMethod m : {RowMethod::analytic, RowMethod::mc, RowMethod::high_snr}) {
    if (method_name(m) == s) return m;
  }
  throw ConfigError("results: bad method '" + std::string(s) + "'");
}

std::string json_number(double v) { return std::isfinite(v) ? g17(v) : "null"; }

double json_double(const json& v) { return v.is_null() ? NAN : v.get<double>(); }

}  // namespace

std::string_view mode_name(RowMode m) { return m == RowMode::df ? "df" : "af"; }

std::string_view method_name(RowMethod m) {
  switch (m) {
    case RowMethod::analytic: return "analytic";
    case RowMethod::mc: return "mc";
    case RowMethod::high_snr: return "high_snr";
  }
  return "";
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.scenario_id, a.sweep_value, a.mode, a.method) <
           std::tie(b.scenario_id, b.sweep_value, b.mode, b.method);
  });
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.scenario_id) << ',' << g17(r.sweep_value) << ',' << mode_name(r.mode) << ','
        << method_name(r.method) << ',' << g17(r.outage) << ',' << g17(r.err) << ',' << r.n_samples
        << ',' << r.seed << ',' << g17(r.runtime_ms) << '\n';
  }
}

// Written by hand so numbers keep the same 17-digit form as the CSV.
void write_json(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << (i ? ",\n  " : "\n  ") << "{\"scenario_id\": " << json(r.scenario_id).dump()
        << ", \"sweep_value\": " << json_number(r.sweep_value) << ", \"mode\": \"" << mode_name(r.mode)
        << "\", \"method\": \"" << method_name(r.method) << "\", \"outage\": " << json_number(r.outage)
        << ", \"err\": " << json_number(r.err) << ", \"n_samples\": " << r.n_samples
        << ", \"seed\": " << r.seed << ", \"runtime_ms\": " << json_number(r.runtime_ms) << "}";
  }
  out << (rows.empty() ? "]\n" : "\n]\n");
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("results: missing CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != 9) throw ConfigError("results: expected 9 fields in '" + line + "'");
    rows.push_back({f[0], to_double(f[1]), parse_mode(f[2]), parse_method(f[3]), to_double(f[4]),
                    to_double(f[5]), to_u64(f[6]), to_u64(f[7]), to_double(f[8])});
  }
  return rows;
}

std::vector<ResultRow> read_json(std::istream& in) {
  const json doc = json::parse(in);
  std::vector<ResultRow> rows;
  for (const auto& o : doc) {
    rows.push_back({o.at("scenario_id").get<std::string>(), json_double(o.at("sweep_value")),
                    parse_mode(o.at("mode").get<std::string>()),
                    parse_method(o.at("method").get<std::string>()), json_double(o.at("outage")),
                    json_double(o.at("err")), o.at("n_samples").get<std::uint64_t>(),
                    o.at("seed").get<std::uint64_t>(), json_double(o.at("runtime_ms"))});
  }
  return rows;
}

}  // namespace fdrelay::cli
