#pragma once

// Flat "key = value" text handling shared by the timing, config and scenario
// file formats.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "memint/error.hpp"

namespace memint::kv {

using Map = std::map<std::string, std::string>;

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Strips a trailing '#' comment.
inline std::string_view strip_comment(std::string_view line) {
  const auto p = line.find('#');
  return p == std::string_view::npos ? line : line.substr(0, p);
}

// Splits "key = value". Returns nullopt for blank lines.
inline std::optional<std::pair<std::string, std::string>> split_assignment(
    std::string_view raw, int line_no) {
  const auto line = trim(strip_comment(raw));
  if (line.empty()) return std::nullopt;
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw Error("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                std::string(line) + "'");
  }
  auto key = lower(trim(line.substr(0, eq)));
  auto value = std::string(trim(line.substr(eq + 1)));
  if (key.empty()) throw Error("line " + std::to_string(line_no) + ": empty key");
  return std::make_pair(std::move(key), std::move(value));
}

inline Map parse(std::string_view text) {
  Map out;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto kv = split_assignment(line, n)) out[kv->first] = kv->second;
  }
  return out;
}

// "[name]" headers group the assignments that follow; keys before the first
// header land in section "".
inline std::map<std::string, Map> parse_sections(std::string_view text) {
  std::map<std::string, Map> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    const auto line = trim(strip_comment(raw));
    if (!line.empty() && line.front() == '[') {
      if (line.back() != ']') throw Error("line " + std::to_string(n) + ": bad section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      out[section];
      continue;
    }
    if (auto kv = split_assignment(line, n)) out[section][kv->first] = kv->second;
  }
  return out;
}

inline std::int64_t to_int(const std::string& key, std::string_view v) {
  std::int64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) {
    throw Error("key '" + key + "': expected integer, got '" + std::string(v) + "'");
  }
  return out;
}

inline double to_double(const std::string& key, std::string_view v) {
  // from_chars for double is not available on every libstdc++ we target.
  std::string s(v);
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error("key '" + key + "': expected number, got '" + s + "'");
  }
  return out;
}

inline bool to_bool(const std::string& key, std::string_view v) {
  const auto s = lower(v);
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw Error("key '" + key + "': expected on/off, got '" + std::string(v) + "'");
}

// Whitespace-separated tokens.
inline std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace memint::kv
