#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "memint/error.hpp"
#include "memint/kv.hpp"

namespace memint {

// Memory-clock cycles.
using Cycle = std::int64_t;

// JEDEC DDR3 timing constraints, all in memory-clock cycles except tck_ns.
// Construct through make_timing() so the derived fields and invariants hold.
struct TimingParams {
  double tck_ns = 1.87;
  Cycle tRP = 7;
  Cycle tRCD = 7;
  Cycle CL = 7;
  Cycle WL = 6;
  Cycle tBURST = 4;
  Cycle tCCD = 4;
  Cycle tWTR = 4;
  Cycle tRRD = 4;
  Cycle tRTP = 4;
  Cycle tFAW = 20;
  Cycle tRC = 27;
  // Write recovery: last write burst to PRE on the same bank. Kept short
  // enough that a row-missing write cycles its bank in exactly tRC.
  Cycle tWR = 3;
  // Read CAS to write CAS gap on the channel.
  Cycle tRTW = 7;
  // Derived: tRC - tRP.
  Cycle tRAS = 20;

  // Write CAS to read CAS gap on the channel.
  Cycle write_to_read() const { return WL + tBURST + tWTR; }

  double to_ns(Cycle c) const { return static_cast<double>(c) * tck_ns; }

  bool operator==(const TimingParams&) const = default;
};

// JEDEC value for tWR at DDR3-1066 (15 ns rounded up to whole cycles). With it
// a row-missing write occupies its bank for tRCD + WL + tBURST + tWR + tRP =
// 32 cycles instead of tRC.
inline constexpr Cycle kJedecTwrDdr3_1066 = 8;

namespace detail {

struct TimingKey {
  std::string_view name;
  Cycle TimingParams::*field;
};

inline constexpr std::array<TimingKey, 11> kCycleKeys{{
    {"trp", &TimingParams::tRP},
    {"trcd", &TimingParams::tRCD},
    {"cl", &TimingParams::CL},
    {"wl", &TimingParams::WL},
    {"tburst", &TimingParams::tBURST},
    {"tccd", &TimingParams::tCCD},
    {"twtr", &TimingParams::tWTR},
    {"trrd", &TimingParams::tRRD},
    {"trtp", &TimingParams::tRTP},
    {"tfaw", &TimingParams::tFAW},
    {"trc", &TimingParams::tRC},
}};

}  // namespace detail

inline void validate(const TimingParams& t) {
  if (!(t.tck_ns > 0)) throw Error("tck_ns must be > 0");
  for (const auto& k : detail::kCycleKeys) {
    if (t.*(k.field) < 1) throw Error(std::string(k.name) + " must be >= 1 cycle");
  }
  if (t.tWR < 1) throw Error("twr must be >= 1 cycle");
  if (t.tRTW < 1) throw Error("trtw must be >= 1 cycle");
  if (t.tRC <= t.tRP) throw Error("tRC <= tRP: row cycle must exceed precharge time");
  if (t.tFAW < t.tRRD) throw Error("tFAW < tRRD");
  if (t.tRAS != t.tRC - t.tRP) throw Error("tRAS must equal tRC - tRP");
}

// Builds validated timing from a raw parameter map keyed by lowercase symbol
// names. Every JEDEC key is required; twr and trtw are optional.
inline TimingParams make_timing(const kv::Map& raw) {
  TimingParams t;
  auto need = [&](std::string_view key) -> const std::string& {
    auto it = raw.find(std::string(key));
    if (it == raw.end()) throw Error("missing timing field '" + std::string(key) + "'");
    return it->second;
  };
  t.tck_ns = kv::to_double("tck_ns", need("tck_ns"));
  for (const auto& k : detail::kCycleKeys) {
    t.*(k.field) = kv::to_int(std::string(k.name), need(k.name));
  }
  if (auto it = raw.find("twr"); it != raw.end()) t.tWR = kv::to_int("twr", it->second);
  if (auto it = raw.find("trtw"); it != raw.end()) {
    t.tRTW = kv::to_int("trtw", it->second);
  } else {
    t.tRTW = t.CL + t.tBURST + 2 - t.WL;
  }
  for (const auto& [key, _] : raw) {
    bool known = key == "tck_ns" || key == "twr" || key == "trtw";
    for (const auto& k : detail::kCycleKeys) known = known || key == k.name;
    if (!known) throw Error("unknown timing field '" + key + "'");
  }
  t.tRAS = t.tRC - t.tRP;
  validate(t);
  return t;
}

inline kv::Map to_map(const TimingParams& t) {
  kv::Map m;
  std::ostringstream ck;
  ck << t.tck_ns;
  m["tck_ns"] = ck.str();
  for (const auto& k : detail::kCycleKeys) m[std::string(k.name)] = std::to_string(t.*(k.field));
  m["twr"] = std::to_string(t.tWR);
  m["trtw"] = std::to_string(t.tRTW);
  return m;
}

// DDR3-1066 defaults.
inline TimingParams ddr3_1066() { return make_timing(to_map(TimingParams{})); }

// Flat key-value timing file, values in cycles except tck_ns.
inline TimingParams load_timing(std::string_view text) { return make_timing(kv::parse(text)); }

inline std::string write_timing(const TimingParams& t) {
  std::ostringstream out;
  // Emit in the canonical symbol order rather than map order.
  out << "tck_ns = " << t.tck_ns << "\n";
  for (const auto& k : detail::kCycleKeys) out << k.name << " = " << t.*(k.field) << "\n";
  out << "twr = " << t.tWR << "\n";
  out << "trtw = " << t.tRTW << "\n";
  return out.str();
}

}  // namespace memint
