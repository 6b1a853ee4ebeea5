#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lampwalk/errors.hpp"
#include "lampwalk/lamp_group.hpp"

namespace lampwalk::io {

inline constexpr std::string_view kVersion = "0.1.0";

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// nlohmann::json keeps object keys sorted, so dump() is a canonical form.
inline std::uint64_t config_hash(const nlohmann::json& config) { return fnv1a64(config.dump()); }

// Run header for every primary output: tool version, config hash, seed.
// Deliberately no timestamps, so reruns are byte-identical.
inline void write_meta(std::ostream& os, std::uint64_t config_hash_value, std::uint64_t seed) {
  os << "# lampwalk " << kVersion << " config=" << hex16(config_hash_value) << " seed=" << seed
     << "\n";
}

inline nlohmann::json meta_json(std::uint64_t config_hash_value, std::uint64_t seed) {
  return nlohmann::json{{"tool", "lampwalk"},
                        {"version", std::string(kVersion)},
                        {"config", hex16(config_hash_value)},
                        {"seed", seed}};
}

// Shortest round-trip decimal form, stable across runs.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Lamp table schema: {"order": n, "mul": n x n row-major index table}.
inline FiniteLampGroup lamp_group_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("order") || !j.contains("mul"))
    throw ConfigError("lamp table json must be {order, mul}");
  if (!j["order"].is_number_integer()) throw ConfigError("lamp table key 'order' must be an integer");
  const std::int64_t order = j["order"].get<std::int64_t>();
  if (order < 1 || order > 256) throw ConfigError("lamp table key 'order' must be in 1..256");
  if (!j["mul"].is_array() || j["mul"].size() != static_cast<std::size_t>(order))
    throw ConfigError("lamp table key 'mul' must be an order x order array");
  std::vector<std::int32_t> mul;
  mul.reserve(static_cast<std::size_t>(order * order));
  for (const auto& row : j["mul"]) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(order))
      throw ConfigError("lamp table key 'mul' must be an order x order array");
    for (const auto& cell : row) {
      if (!cell.is_number_integer()) throw ConfigError("lamp table key 'mul' must hold integers");
      mul.push_back(cell.get<std::int32_t>());
    }
  }
  return FiniteLampGroup(static_cast<std::int32_t>(order), std::move(mul));
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("file '" + path + "' is not valid json: " + e.what());
  }
}

inline FiniteLampGroup load_lamp_table(const std::string& path) {
  return lamp_group_from_json(load_json_file(path));
}

}  // namespace lampwalk::io
