#pragma once

// Flat `key = value` configuration files. `#` starts a comment, list values
// are comma separated and integer lists accept `a..b` ranges. Unknown keys
// and bad values are reported with the file name and line number.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "iabsim/engine.hpp"

namespace iabsim {

enum class SweepDimension { None, PBlk, UeCount, TrafficMode };

inline std::string_view to_string(SweepDimension d) {
  switch (d) {
    case SweepDimension::None: return "none";
    case SweepDimension::PBlk: return "p_blk";
    case SweepDimension::UeCount: return "ue_count";
    case SweepDimension::TrafficMode: return "traffic_mode";
  }
  return "?";
}

struct SweepSpec {
  std::string name{"run"};
  ScenarioConfig base;
  SweepDimension dimension{SweepDimension::None};
  std::vector<double> p_blk_values;
  std::vector<std::size_t> ue_values;
  std::vector<TrafficMode> traffic_values;
  std::vector<Policy> policies{Policy::RFAS};
  std::vector<PathMode> path_modes{PathMode::DualPath};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t workers{1};

  std::size_t value_count() const {
    switch (dimension) {
      case SweepDimension::None: return 1;
      case SweepDimension::PBlk: return p_blk_values.size();
      case SweepDimension::UeCount: return ue_values.size();
      case SweepDimension::TrafficMode: return traffic_values.size();
    }
    return 0;
  }

  // Base config with the i-th sweep value applied.
  ScenarioConfig cell(std::size_t i) const {
    ScenarioConfig c = base;
    switch (dimension) {
      case SweepDimension::None: break;
      case SweepDimension::PBlk: c.p_blk = p_blk_values.at(i); break;
      case SweepDimension::UeCount: c.ue_count = ue_values.at(i); break;
      case SweepDimension::TrafficMode: c.traffic_mode = traffic_values.at(i); break;
    }
    return c;
  }

  void validate() const {
    base.validate();
    if (value_count() == 0) throw ConfigError("sweep needs at least one value");
    if (policies.empty()) throw ConfigError("policies must not be empty");
    if (path_modes.empty()) throw ConfigError("path_modes must not be empty");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    if (workers == 0) throw ConfigError("workers must be at least 1");
    for (std::size_t i = 0; i < value_count(); ++i) cell(i).validate();
  }
};

namespace parse {

inline std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = s.find(',', start);
    auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw ConfigError("empty list element");
    out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

inline std::uint64_t to_uint(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("not a non-negative integer: '" + s + "'");
  return v;
}

inline std::vector<std::uint64_t> to_uint_list(std::string_view s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(s)) {
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_uint(item));
      continue;
    }
    auto lo = to_uint(trim(item.substr(0, dots)));
    auto hi = to_uint(trim(item.substr(dots + 2)));
    if (hi < lo) throw ConfigError("empty range '" + item + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

inline Policy to_policy(const std::string& s) {
  auto v = lower(s);
  if (v == "rfas") return Policy::RFAS;
  if (v == "qas") return Policy::QAS;
  if (v == "fas") return Policy::FAS;
  throw ConfigError("unknown policy '" + s + "' (rfas, qas, fas)");
}

inline PathMode to_path_mode(const std::string& s) {
  auto v = lower(s);
  if (v == "dual" || v == "dualpath") return PathMode::DualPath;
  if (v == "single" || v == "singlepath") return PathMode::SinglePath;
  throw ConfigError("unknown path mode '" + s + "' (dual, single)");
}

inline TrafficMode to_traffic_mode(const std::string& s) {
  auto v = lower(s);
  if (v == "high") return TrafficMode::High;
  if (v == "low") return TrafficMode::Low;
  if (v == "mixed") return TrafficMode::Mixed;
  if (v == "burst") return TrafficMode::Burst;
  throw ConfigError("unknown traffic mode '" + s + "' (high, low, mixed, burst)");
}

inline CsiMode to_csi_mode(const std::string& s) {
  auto v = lower(s);
  if (v == "genie") return CsiMode::Genie;
  if (v == "blind") return CsiMode::Blind;
  throw ConfigError("unknown csi mode '" + s + "' (genie, blind)");
}

inline StaleDiscard to_stale_discard(const std::string& s) {
  auto v = lower(s);
  if (v == "off") return StaleDiscard::Off;
  if (v == "superseded") return StaleDiscard::Superseded;
  if (v == "sibling") return StaleDiscard::Sibling;
  throw ConfigError("unknown stale_discard '" + s + "' (off, superseded, sibling)");
}

inline SweepDimension to_dimension(const std::string& s) {
  auto v = lower(s);
  if (v == "none") return SweepDimension::None;
  if (v == "p_blk") return SweepDimension::PBlk;
  if (v == "ue_count") return SweepDimension::UeCount;
  if (v == "traffic_mode") return SweepDimension::TrafficMode;
  throw ConfigError("unknown sweep dimension '" + s + "' (none, p_blk, ue_count, traffic_mode)");
}

template <typename T, typename F>
std::vector<T> map_list(std::string_view s, F f) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) out.push_back(f(item));
  return out;
}

inline double probability(const std::string& s) {
  double v = to_double(s);
  if (!(v >= 0.0 && v < 1.0)) throw ConfigError("p_blk must lie in [0, 1), got " + s);
  return v;
}

template <typename T>
T at_least(T v, std::type_identity_t<T> lo, const std::string& key) {
  if (v < lo) throw ConfigError(key + " must be at least " + std::to_string(lo));
  return v;
}

inline double positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
  return v;
}

// Applies one key. Returns false for an unknown key.
inline bool apply(SweepSpec& spec, const std::string& key, const std::string& value,
                  std::optional<std::string>& raw_values) {
  ScenarioConfig& c = spec.base;
  if (key == "name") spec.name = value;
  else if (key == "horizon") {
    auto v = to_uint(value);
    if (v < 1) throw ConfigError("horizon must be at least 1");
    c.horizon = static_cast<Slot>(v);
  } else if (key == "rows") c.rows = at_least(to_uint(value), 1, key);
  else if (key == "cols") c.cols = at_least(to_uint(value), 1, key);
  else if (key == "spacing") c.spacing = positive(to_double(value), key);
  else if (key == "donor_row") {
    auto d = c.donor();
    c.donor_cell = GridIndex{static_cast<std::size_t>(to_uint(value)), d.col};
  } else if (key == "donor_col") {
    auto d = c.donor();
    c.donor_cell = GridIndex{d.row, static_cast<std::size_t>(to_uint(value))};
  } else if (key == "ue_count") c.ue_count = to_uint(value);
  else if (key == "traffic_mode") c.traffic_mode = to_traffic_mode(value);
  else if (key == "burst_slot") c.burst_slot = static_cast<Slot>(to_uint(value));
  else if (key == "burst_size") c.burst_size = to_uint(value);
  else if (key == "p_blk") c.p_blk = probability(value);
  else if (key == "block_duration") c.block_duration = at_least(to_double(value), 1.0, key);
  else if (key == "gamma") c.gamma = positive(to_double(value), key);
  else if (key == "buffer_cap") c.buffer_cap = at_least(to_uint(value), 1, key);
  else if (key == "interference_range") c.interference_range = at_least(to_double(value), 0.0, key);
  else if (key == "policy") c.policy = to_policy(value);
  else if (key == "path_mode") c.path_mode = to_path_mode(value);
  else if (key == "csi_mode") c.csi_mode = to_csi_mode(value);
  else if (key == "k_max") c.k_max = at_least(to_uint(value), 2, key);
  else if (key == "stale_discard") c.stale_discard = to_stale_discard(value);
  else if (key == "seed") c.seed = to_uint(value);
  else if (key == "sweep") spec.dimension = to_dimension(value);
  else if (key == "values") raw_values = value;
  else if (key == "policies") spec.policies = map_list<Policy>(value, to_policy);
  else if (key == "path_modes") spec.path_modes = map_list<PathMode>(value, to_path_mode);
  else if (key == "seeds") spec.seeds = to_uint_list(value);
  else if (key == "workers") spec.workers = at_least(to_uint(value), 1, key);
  else return false;
  return true;
}

inline void apply_values(SweepSpec& spec, const std::string& raw) {
  switch (spec.dimension) {
    case SweepDimension::None: throw ConfigError("values given without a sweep dimension");
    case SweepDimension::PBlk: spec.p_blk_values = map_list<double>(raw, probability); break;
    case SweepDimension::UeCount:
      spec.ue_values.clear();
      for (auto v : to_uint_list(raw)) spec.ue_values.push_back(static_cast<std::size_t>(v));
      break;
    case SweepDimension::TrafficMode: spec.traffic_values = map_list<TrafficMode>(raw, to_traffic_mode); break;
  }
}

}  // namespace parse

// Parses config text. `origin` prefixes error messages (usually the path).
inline SweepSpec parse_config_text(std::string_view text, const std::string& origin = "<config>") {
  SweepSpec spec;
  std::optional<std::string> raw_values;
  std::size_t values_line = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  auto fail = [&](std::size_t n, const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(n) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto body = parse::trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) fail(number, "expected 'key = value', got '" + body + "'");
    auto key = parse::lower(parse::trim(std::string_view(body).substr(0, eq)));
    auto value = parse::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) fail(number, "missing key");
    if (value.empty()) fail(number, "missing value for '" + key + "'");
    try {
      std::optional<std::string> v;
      if (!parse::apply(spec, key, value, v)) fail(number, "unknown key '" + key + "'");
      if (v) {
        raw_values = v;
        values_line = number;
      }
    } catch (const ConfigError& e) {
      if (std::string_view(e.what()).starts_with(origin + ":")) throw;
      fail(number, e.what());
    }
  }
  if (raw_values) {
    try {
      parse::apply_values(spec, *raw_values);
    } catch (const ConfigError& e) {
      fail(values_line, e.what());
    }
  } else if (spec.dimension != SweepDimension::None) {
    throw ConfigError(origin + ": sweep '" + std::string(to_string(spec.dimension)) + "' needs values");
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return spec;
}

inline SweepSpec parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace iabsim
