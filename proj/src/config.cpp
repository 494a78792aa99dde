#include "dmbohm/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

namespace dmbohm {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::BadConfig, "invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error(ErrorCode::BadConfig, "invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

std::string_view scheme_name(DerivativeScheme s) { return s == DerivativeScheme::Spectral ? "spectral" : "fd4"; }

DerivativeScheme parse_scheme(std::string_view text) {
  if (text == "spectral") return DerivativeScheme::Spectral;
  if (text == "fd4") return DerivativeScheme::FiniteDifference4;
  throw Error(ErrorCode::BadConfig, "scheme must be spectral or fd4, got '" + std::string(text) + "'");
}

std::string_view format_name(TrajectoryFormat f) { return f == TrajectoryFormat::Csv ? "csv" : "jsonl"; }

TrajectoryFormat parse_format(std::string_view text) {
  if (text == "csv") return TrajectoryFormat::Csv;
  if (text == "jsonl") return TrajectoryFormat::Jsonl;
  throw Error(ErrorCode::BadConfig, "format must be csv or jsonl, got '" + std::string(text) + "'");
}

struct Key {
  std::function<void(RunConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Key number(T ScenarioConfig::*field) {
  return {[field](RunConfig& c, std::string_view k, std::string_view v) { c.scenario.*field = parse_number<T>(k, v); },
          [field](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_number(c.scenario.*field);
            } else {
              return std::to_string(c.scenario.*field);
            }
          }};
}

// Ordered so serialization is stable; variant is handled separately.
const std::vector<std::pair<std::string, Key>>& keys() {
  static const std::vector<std::pair<std::string, Key>> table{
      {"grid.x_lo", number(&ScenarioConfig::x_lo)},
      {"grid.x_extent", number(&ScenarioConfig::x_extent)},
      {"grid.x_points", number(&ScenarioConfig::x_points)},
      {"grid.y_lo", number(&ScenarioConfig::y_lo)},
      {"grid.y_extent", number(&ScenarioConfig::y_extent)},
      {"grid.y_points", number(&ScenarioConfig::y_points)},
      {"evolution.dt", number(&ScenarioConfig::dt)},
      {"evolution.t_final", number(&ScenarioConfig::t_final)},
      {"evolution.record_stride", number(&ScenarioConfig::record_stride)},
      {"evolution.mass", number(&ScenarioConfig::mass)},
      {"evolution.scheme",
       {[](RunConfig& c, std::string_view, std::string_view v) { c.scenario.scheme = parse_scheme(v); },
        [](const RunConfig& c) { return std::string(scheme_name(c.scenario.scheme)); }}},
      {"scenario.x0", number(&ScenarioConfig::x0)},
      {"scenario.sigma", number(&ScenarioConfig::sigma)},
      {"scenario.k", number(&ScenarioConfig::k)},
      {"scenario.pointer_sigma", number(&ScenarioConfig::pointer_sigma)},
      {"scenario.pointer_separation", number(&ScenarioConfig::pointer_separation)},
      {"scenario.pointer_center", number(&ScenarioConfig::pointer_center)},
      {"scenario.phase", number(&ScenarioConfig::phase)},
      {"scenario.n", number(&ScenarioConfig::n)},
      {"scenario.seed", number(&ScenarioConfig::seed)},
      {"scenario.bins", number(&ScenarioConfig::bins)},
      {"output.dir", {[](RunConfig& c, std::string_view, std::string_view v) { c.output.dir = std::string(v); },
                      [](const RunConfig& c) { return c.output.dir; }}},
      {"output.format", {[](RunConfig& c, std::string_view, std::string_view v) { c.output.format = parse_format(v); },
                         [](const RunConfig& c) { return std::string(format_name(c.output.format)); }}},
      {"output.svg", {[](RunConfig& c, std::string_view k, std::string_view v) { c.output.svg = parse_bool(k, v); },
                      [](const RunConfig& c) { return std::string(c.output.svg ? "true" : "false"); }}},
  };
  return table;
}

const Key* find_key(std::string_view dotted) {
  for (const auto& [name, key] : keys()) {
    if (name == dotted) return &key;
  }
  return nullptr;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void apply_override(RunConfig& c, std::string_view dotted_key, std::string_view value) {
  if (dotted_key == "scenario.variant") {
    c.scenario.variant = parse_variant(value);
    return;
  }
  const Key* key = find_key(dotted_key);
  if (!key) throw Error(ErrorCode::BadConfig, "unknown config key '" + std::string(dotted_key) + "'");
  key->set(c, dotted_key, value);
}

RunConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
  RunConfig c;
  c.scenario = ScenarioConfig::defaults(parse_variant(tree.get<std::string>("scenario.variant", "real-dm")));
  for (const auto& [section, body] : tree) {
    if (section != "grid" && section != "evolution" && section != "scenario" && section != "output") {
      throw Error(ErrorCode::BadConfig, "unknown config section [" + section + "]");
    }
    if (!body.data().empty()) throw Error(ErrorCode::BadConfig, "key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      const std::string dotted = section + "." + key;
      if (dotted == "scenario.variant") continue;
      apply_override(c, dotted, value.data());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, key] : keys()) {
    if (name == "scenario.x0") out.emplace_back("scenario.variant", std::string(to_string(c.scenario.variant)));
    out.emplace_back(name, key.get(c));
  }
  return out;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  std::string section;
  for (const auto& [name, value] : config_entries(c)) {
    const std::string s = name.substr(0, name.find('.'));
    if (s != section) {
      if (!section.empty()) out << '\n';
      section = s;
      out << '[' << section << "]\n";
    }
    out << name.substr(name.find('.') + 1) << " = " << value << '\n';
  }
  return out.str();
}

std::uint64_t config_digest(const RunConfig& c) {
  RunConfig located = c;
  located.output.dir.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(located)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::filesystem::path output_directory(const OutputConfig& o) {
  if (!o.dir.empty()) return o.dir;
  if (const char* env = std::getenv("DMBOHM_OUT_DIR"); env && *env) return env;
  return "out";
}

}  // namespace dmbohm
