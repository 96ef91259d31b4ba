#pragma once

// Scenario description: timing, controller and MSHR configuration, request
// generators and pre-staged queue contents. Serializes to a sectioned
// key-value text format:
//
//   [scenario] [timing] [scheduler] [mshr] [partition] [banks]
//   [generator]   (repeatable)
//   [prestage]    (one "read|write core=C bank=B row=R" per line)

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "memint/device.hpp"
#include "memint/error.hpp"
#include "memint/generator.hpp"
#include "memint/kv.hpp"
#include "memint/mshr.hpp"
#include "memint/scheduler.hpp"
#include "memint/timing.hpp"

namespace memint {

struct StagedRequest {
  CoreId core = 0;
  BankId bank = 0;
  Row row = 0;
  bool is_write = false;

  bool operator==(const StagedRequest&) const = default;
};

struct ScenarioSpec {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  Cycle horizon = 1'000'000;
  // Cycles without an issue, with requests queued, before the run aborts.
  Cycle stall_window = 10'000;
  std::size_t num_cores = 1;
  std::optional<CoreId> analyzed_core;
  // Stop as soon as this core's generator is done and drained.
  std::optional<CoreId> until_core_done;

  TimingParams timing;
  SchedulerConfig scheduler;
  MshrConfig mshr;
  // Private bank per core (used when partitioning is on).
  std::vector<BankId> core_bank;
  // Initially open row per bank; banks otherwise start idle.
  std::map<BankId, Row> open_rows;
  std::vector<GeneratorSpec> generators;
  // Enqueued at cycle 0 in list order, before any generator runs.
  std::vector<StagedRequest> prestage;

  bool operator==(const ScenarioSpec&) const = default;

  BankId bank_of(CoreId c) const { return c < core_bank.size() ? core_bank[c] : static_cast<BankId>(c); }

  std::vector<BankState> initial_banks() const {
    std::vector<BankState> banks(scheduler.num_banks);
    for (const auto& [b, r] : open_rows) banks.at(b).open_row = r;
    return banks;
  }
};

inline void validate(const ScenarioSpec& s) {
  validate(s.timing);
  validate(s.scheduler);
  if (s.num_cores == 0) throw Error("scenario needs at least one core");
  if (s.horizon <= 0) throw Error("horizon must be > 0");
  if (s.stall_window <= 0) throw Error("stall_window must be > 0");
  if (!s.core_bank.empty() && s.core_bank.size() != s.num_cores) {
    throw Error("partition lists " + std::to_string(s.core_bank.size()) + " cores, scenario has " +
                std::to_string(s.num_cores));
  }
  for (auto b : s.core_bank) {
    if (b >= s.scheduler.num_banks) throw Error("partition bank out of range");
  }
  for (const auto& [b, _] : s.open_rows) {
    if (b >= s.scheduler.num_banks) throw Error("open row on bank out of range");
  }
  auto check_core = [&](CoreId c, const char* what) {
    if (c >= s.num_cores) throw Error(std::string(what) + " core out of range");
  };
  if (s.analyzed_core) check_core(*s.analyzed_core, "analyzed");
  if (s.until_core_done) check_core(*s.until_core_done, "until_core_done");
  std::vector<bool> has_gen(s.num_cores, false);
  for (const auto& g : s.generators) {
    validate(g);
    check_core(g.core, "generator");
    if (has_gen[g.core]) throw Error("more than one generator on core " + std::to_string(g.core));
    has_gen[g.core] = true;
    if (g.bank >= s.scheduler.num_banks) throw Error("generator bank out of range");
    if (s.scheduler.partitioning && g.bank != s.bank_of(g.core)) {
      throw Error("generator on core " + std::to_string(g.core) + " targets bank " +
                  std::to_string(g.bank) + " outside its partition");
    }
  }
  std::size_t reads = 0, writes = 0;
  for (const auto& p : s.prestage) {
    check_core(p.core, "prestaged request");
    if (p.bank >= s.scheduler.num_banks) throw Error("prestaged request bank out of range");
    if (s.scheduler.partitioning && p.bank != s.bank_of(p.core)) {
      throw Error("prestaged request of core " + std::to_string(p.core) +
                  " targets bank outside its partition");
    }
    ++(p.is_write ? writes : reads);
  }
  if (reads > s.scheduler.read_queue_cap) throw Error("prestaged reads exceed read queue capacity");
  if (writes > s.scheduler.write_queue_cap) {
    throw Error("prestaged writes exceed write queue capacity");
  }
}

namespace detail {

inline std::string opt_to_string(const std::optional<std::uint32_t>& v) {
  return v ? std::to_string(*v) : "none";
}

inline std::optional<std::uint32_t> parse_opt(const std::string& key, const std::string& v) {
  if (kv::lower(v) == "none" || v.empty()) return std::nullopt;
  return static_cast<std::uint32_t>(kv::to_int(key, v));
}

inline std::uint32_t parse_index(const std::string& key, std::string_view prefix) {
  if (key.rfind(prefix, 0) != 0) throw Error("unexpected key '" + key + "'");
  return static_cast<std::uint32_t>(kv::to_int(key, key.substr(prefix.size())));
}

inline Mode parse_mode(const std::string& v) {
  const auto s = kv::lower(v);
  if (s == "read") return Mode::Read;
  if (s == "drain" || s == "write_drain") return Mode::WriteDrain;
  throw Error("unknown initial_mode '" + v + "'");
}

inline StagedRequest parse_staged(const std::string& line, int line_no) {
  const auto toks = kv::tokens(line);
  auto fail = [&](const std::string& why) -> StagedRequest {
    throw Error("line " + std::to_string(line_no) + ": prestage entry " + why);
  };
  if (toks.empty()) fail("is empty");
  StagedRequest r;
  const auto dir = kv::lower(toks[0]);
  if (dir == "read") {
    r.is_write = false;
  } else if (dir == "write") {
    r.is_write = true;
  } else {
    fail("must start with read or write");
  }
  bool core = false, bank = false, row = false;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos) fail("field '" + toks[i] + "' is not key=value");
    const auto k = kv::lower(toks[i].substr(0, eq));
    const auto v = toks[i].substr(eq + 1);
    const auto n = static_cast<std::uint32_t>(kv::to_int(k, v));
    if (k == "core") {
      r.core = n;
      core = true;
    } else if (k == "bank") {
      r.bank = n;
      bank = true;
    } else if (k == "row") {
      r.row = n;
      row = true;
    } else {
      fail("has unknown field '" + k + "'");
    }
  }
  if (!core || !bank || !row) fail("needs core, bank and row");
  return r;
}

inline GeneratorSpec parse_generator(const kv::Map& m) {
  GeneratorSpec g;
  for (const auto& [k, v] : m) {
    if (k == "kind") g.kind = parse_generator_kind(v);
    else if (k == "core") g.core = static_cast<CoreId>(kv::to_int(k, v));
    else if (k == "bank") g.bank = static_cast<BankId>(kv::to_int(k, v));
    else if (k == "rows") g.rows = parse_row_policy(v);
    else if (k == "budget") g.budget = static_cast<std::uint64_t>(kv::to_int(k, v));
    else if (k == "stop_cycle") {
      if (kv::lower(v) != "none") g.stop_cycle = kv::to_int(k, v);
    } else if (k == "start_cycle") g.start_cycle = kv::to_int(k, v);
    else if (k == "compute_gap") g.compute_gap = kv::to_int(k, v);
    else if (k == "start_row") g.start_row = static_cast<Row>(kv::to_int(k, v));
    else if (k == "hits_per_row") g.hits_per_row = static_cast<std::uint32_t>(kv::to_int(k, v));
    else if (k == "num_rows") g.num_rows = static_cast<std::uint32_t>(kv::to_int(k, v));
    else if (k == "reads_per_write") g.reads_per_write = static_cast<std::uint32_t>(kv::to_int(k, v));
    else if (k == "writeback_buffer") g.writeback_buffer = static_cast<std::uint32_t>(kv::to_int(k, v));
    else if (k == "writeback_row_offset") {
      g.writeback_row_offset = static_cast<std::uint32_t>(kv::to_int(k, v));
    } else if (k == "seed") g.seed = static_cast<std::uint64_t>(kv::to_int(k, v));
    else throw Error("unknown generator field '" + k + "'");
  }
  return g;
}

}  // namespace detail

inline ScenarioSpec parse_scenario(std::string_view text) {
  ScenarioSpec s;
  s.timing = ddr3_1066();
  kv::Map timing = to_map(s.timing);
  timing.erase("trtw");
  std::vector<kv::Map> generators;
  bool num_cores_given = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = std::string(kv::trim(kv::strip_comment(raw)));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error("line " + std::to_string(line_no) + ": bad section header");
      section = kv::lower(kv::trim(std::string_view(line).substr(1, line.size() - 2)));
      if (section == "generator") generators.emplace_back();
      else if (section != "scenario" && section != "timing" && section != "scheduler" &&
               section != "mshr" && section != "partition" && section != "banks" &&
               section != "prestage") {
        throw Error("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      continue;
    }
    if (section == "prestage") {
      s.prestage.push_back(detail::parse_staged(line, line_no));
      continue;
    }
    auto kvp = kv::split_assignment(line, line_no);
    if (!kvp) continue;
    const auto& [k, v] = *kvp;
    if (section == "scenario") {
      if (k == "name") s.name = v;
      else if (k == "seed") s.seed = static_cast<std::uint64_t>(kv::to_int(k, v));
      else if (k == "horizon") s.horizon = kv::to_int(k, v);
      else if (k == "stall_window") s.stall_window = kv::to_int(k, v);
      else if (k == "num_cores") {
        s.num_cores = static_cast<std::size_t>(kv::to_int(k, v));
        num_cores_given = true;
      } else if (k == "analyzed_core") s.analyzed_core = detail::parse_opt(k, v);
      else if (k == "until_core_done") s.until_core_done = detail::parse_opt(k, v);
      else throw Error("line " + std::to_string(line_no) + ": unknown scenario field '" + k + "'");
    } else if (section == "timing") {
      timing[k] = v;
    } else if (section == "scheduler") {
      auto& c = s.scheduler;
      if (k == "read_queue_cap") c.read_queue_cap = static_cast<std::size_t>(kv::to_int(k, v));
      else if (k == "write_queue_cap") c.write_queue_cap = static_cast<std::size_t>(kv::to_int(k, v));
      else if (k == "drain_batch") c.drain_batch = static_cast<std::size_t>(kv::to_int(k, v));
      else if (k == "prioritized_bank") c.prioritized_bank = detail::parse_opt(k, v);
      else if (k == "partitioning") c.partitioning = kv::to_bool(k, v);
      else if (k == "num_banks") c.num_banks = static_cast<std::size_t>(kv::to_int(k, v));
      else if (k == "initial_mode") c.initial_mode = detail::parse_mode(v);
      else throw Error("line " + std::to_string(line_no) + ": unknown scheduler field '" + k + "'");
    } else if (section == "mshr") {
      auto& m = s.mshr;
      if (k == "global_read_cap") m.global_read_cap = static_cast<std::size_t>(kv::to_int(k, v));
      else if (k == "global_write_cap") m.global_write_cap = static_cast<std::size_t>(kv::to_int(k, v));
      else if (k == "per_core_read_cap") m.per_core_read_cap = static_cast<std::size_t>(kv::to_int(k, v));
      else if (k == "reserve_per_core") m.reserve_per_core = static_cast<std::size_t>(kv::to_int(k, v));
      else throw Error("line " + std::to_string(line_no) + ": unknown mshr field '" + k + "'");
    } else if (section == "partition") {
      const auto core = detail::parse_index(k, "core.");
      if (s.core_bank.size() <= core) s.core_bank.resize(core + 1, 0);
      s.core_bank[core] = static_cast<BankId>(kv::to_int(k, v));
    } else if (section == "banks") {
      s.open_rows[detail::parse_index(k, "bank.")] = static_cast<Row>(kv::to_int(k, v));
    } else if (section == "generator") {
      generators.back()[k] = v;
    } else {
      throw Error("line " + std::to_string(line_no) + ": assignment outside any section");
    }
  }
  s.timing = make_timing(timing);
  for (const auto& g : generators) s.generators.push_back(detail::parse_generator(g));
  if (!num_cores_given) {
    std::size_t n = s.core_bank.size();
    for (const auto& g : s.generators) n = std::max<std::size_t>(n, g.core + 1);
    for (const auto& p : s.prestage) n = std::max<std::size_t>(n, p.core + 1);
    s.num_cores = std::max<std::size_t>(n, 1);
  }
  validate(s);
  return s;
}

inline std::string write_scenario(const ScenarioSpec& s) {
  std::ostringstream o;
  o << "[scenario]\n"
    << "name = " << s.name << "\n"
    << "seed = " << s.seed << "\n"
    << "horizon = " << s.horizon << "\n"
    << "stall_window = " << s.stall_window << "\n"
    << "num_cores = " << s.num_cores << "\n"
    << "analyzed_core = " << detail::opt_to_string(s.analyzed_core) << "\n"
    << "until_core_done = " << detail::opt_to_string(s.until_core_done) << "\n\n";
  o << "[timing]\n" << write_timing(s.timing) << "\n";
  const auto& c = s.scheduler;
  o << "[scheduler]\n"
    << "read_queue_cap = " << c.read_queue_cap << "\n"
    << "write_queue_cap = " << c.write_queue_cap << "\n"
    << "drain_batch = " << c.drain_batch << "\n"
    << "prioritized_bank = " << detail::opt_to_string(c.prioritized_bank) << "\n"
    << "partitioning = " << (c.partitioning ? "on" : "off") << "\n"
    << "num_banks = " << c.num_banks << "\n"
    << "initial_mode = " << to_string(c.initial_mode) << "\n\n";
  const auto& m = s.mshr;
  o << "[mshr]\n"
    << "global_read_cap = " << m.global_read_cap << "\n"
    << "global_write_cap = " << m.global_write_cap << "\n"
    << "per_core_read_cap = " << m.per_core_read_cap << "\n"
    << "reserve_per_core = " << m.reserve_per_core << "\n\n";
  if (!s.core_bank.empty()) {
    o << "[partition]\n";
    for (std::size_t i = 0; i < s.core_bank.size(); ++i) o << "core." << i << " = " << s.core_bank[i] << "\n";
    o << "\n";
  }
  if (!s.open_rows.empty()) {
    o << "[banks]\n";
    for (const auto& [b, r] : s.open_rows) o << "bank." << b << " = " << r << "\n";
    o << "\n";
  }
  for (const auto& g : s.generators) {
    o << "[generator]\n"
      << "kind = " << to_string(g.kind) << "\n"
      << "core = " << g.core << "\n"
      << "bank = " << g.bank << "\n"
      << "rows = " << to_string(g.rows) << "\n"
      << "budget = " << g.budget << "\n"
      << "stop_cycle = " << (g.stop_cycle ? std::to_string(*g.stop_cycle) : "none") << "\n"
      << "start_cycle = " << g.start_cycle << "\n"
      << "compute_gap = " << g.compute_gap << "\n"
      << "start_row = " << g.start_row << "\n"
      << "hits_per_row = " << g.hits_per_row << "\n"
      << "num_rows = " << g.num_rows << "\n"
      << "reads_per_write = " << g.reads_per_write << "\n"
      << "writeback_row_offset = " << g.writeback_row_offset << "\n"
      << "writeback_buffer = " << g.writeback_buffer << "\n"
      << "seed = " << g.seed << "\n\n";
  }
  if (!s.prestage.empty()) {
    o << "[prestage]\n";
    for (const auto& p : s.prestage) {
      o << (p.is_write ? "write" : "read") << " core=" << p.core << " bank=" << p.bank
        << " row=" << p.row << "\n";
    }
  }
  return o.str();
}

}  // namespace memint
