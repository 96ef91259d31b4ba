#pragma once

// Hand-built scenarios: the four illustrative schedules (fig2..fig5) and the
// adversarial worst-case family used by the safety sweeps.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "memint/error.hpp"
#include "memint/generator.hpp"
#include "memint/scenario.hpp"

namespace memint {

namespace detail {

inline StagedRequest staged(CoreId c, BankId b, Row r, bool w = false) { return {c, b, r, w}; }

inline ScenarioSpec preset_base(std::string name, std::size_t cores) {
  ScenarioSpec s;
  s.name = std::move(name);
  s.num_cores = cores;
  s.timing = ddr3_1066();
  return s;
}

}  // namespace detail

// Bank 2 holds RD1..RD3 on its open row; RD4 arrives last at Bank 1, also a
// row hit. RD4 is the analyzed request.
inline ScenarioSpec preset_fig2() {
  auto s = detail::preset_base("fig2", 2);
  s.core_bank = {2, 1};
  s.open_rows = {{1, 20}, {2, 10}};
  s.analyzed_core = 1;
  for (int i = 0; i < 3; ++i) s.prestage.push_back(detail::staged(0, 2, 10));
  s.prestage.push_back(detail::staged(1, 1, 20));
  return s;
}

// One row-miss read per bank, both banks closed: RD1 on Bank 2 then RD2 on
// Bank 1.
inline ScenarioSpec preset_fig3() {
  auto s = detail::preset_base("fig3", 2);
  s.core_bank = {2, 1};
  s.analyzed_core = 1;
  s.prestage = {detail::staged(0, 2, 10), detail::staged(1, 1, 20)};
  return s;
}

// RD1 hits Bank 2, RD2 misses Bank 2 behind it, RD3 hits Bank 1. At cycle 4
// RD3's column command outranks the older request's PRE.
inline ScenarioSpec preset_fig4() {
  auto s = detail::preset_base("fig4", 2);
  s.core_bank = {2, 1};
  s.open_rows = {{1, 20}, {2, 10}};
  s.analyzed_core = 1;
  s.prestage = {detail::staged(0, 2, 10), detail::staged(0, 2, 11), detail::staged(1, 1, 20)};
  return s;
}

// Drain already on with WR1, WR2 (row misses, one bank), then RD1 and RD2
// from two competing cores, then the analyzed RD3. Two writes per batch.
inline ScenarioSpec preset_fig5() {
  auto s = detail::preset_base("fig5", 4);
  s.core_bank = {0, 1, 2, 3};
  s.open_rows = {{0, 30}, {1, 10}, {2, 20}, {3, 40}};
  s.analyzed_core = 0;
  s.scheduler.drain_batch = 2;
  s.scheduler.initial_mode = Mode::WriteDrain;
  s.prestage = {detail::staged(3, 3, 41, true), detail::staged(3, 3, 42, true),
                detail::staged(1, 1, 10), detail::staged(2, 2, 20), detail::staged(0, 0, 30)};
  return s;
}

inline std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5"}; }

inline ScenarioSpec preset(const std::string& name) {
  if (name == "fig2") return preset_fig2();
  if (name == "fig3") return preset_fig3();
  if (name == "fig4") return preset_fig4();
  if (name == "fig5") return preset_fig5();
  throw Error("unknown preset '" + name + "' (expected fig2, fig3, fig4 or fig5)");
}

struct AdversarialOptions {
  CoreId analyzed_core = 0;
  GeneratorKind interferer_kind = GeneratorKind::BandwidthWrite;
  std::uint64_t seed = 0;
  // Randomize counts, rows and ordering within the caps.
  bool perturb = false;
  std::size_t num_cores = 4;
};

// Worst case for one read of the analyzed core: a write drain of N_wq row
// misses has just started, up to N_rq row-hit reads of the other cores are
// queued, and the analyzed core's first read arrives right after. Interferers
// keep running generators of the given kind afterwards, with a write budget
// that cannot fill the write queue.
inline ScenarioSpec build_adversarial(const AdversarialOptions& o) {
  if (o.num_cores < 2) throw Error("adversarial scenario needs at least two cores");
  if (o.analyzed_core >= o.num_cores) throw Error("analyzed core out of range");
  ScenarioSpec s;
  s.name = std::string("adversarial-") + to_string(o.interferer_kind) + (o.perturb ? "-perturbed" : "");
  s.seed = o.seed;
  s.num_cores = o.num_cores;
  s.timing = ddr3_1066();
  s.analyzed_core = o.analyzed_core;
  s.until_core_done = o.analyzed_core;
  for (std::size_t c = 0; c < o.num_cores; ++c) s.core_bank.push_back(static_cast<BankId>(c));

  std::mt19937_64 rng(o.seed * 0x2545f4914f6cdd1dull + 0x632be59bd9b4e019ull);
  auto uniform = [&](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
  };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  const auto kind = o.interferer_kind;
  const std::size_t n_wq = s.scheduler.drain_batch;
  const std::size_t per_core = s.mshr.per_core_read_cap;
  const std::uint32_t rows = GeneratorSpec{}.num_rows;

  std::vector<CoreId> interferers;
  for (std::size_t c = 0; c < o.num_cores; ++c) {
    if (c != o.analyzed_core) interferers.push_back(static_cast<CoreId>(c));
  }
  auto row_of = [&](CoreId c) -> Row {
    return o.perturb ? static_cast<Row>(uniform(0, rows - 1)) : static_cast<Row>(100 * (c + 1));
  };
  std::vector<Row> read_row(o.num_cores);
  for (std::size_t c = 0; c < o.num_cores; ++c) {
    read_row[c] = row_of(static_cast<CoreId>(c));
    s.open_rows[static_cast<BankId>(c)] = read_row[c];
  }

  // Staged writes.
  std::size_t writes = 0;
  switch (kind) {
    case GeneratorKind::BandwidthWrite: writes = n_wq; break;
    case GeneratorKind::Stream: writes = 2; break;
    default: break;
  }
  if (o.perturb && writes > 0) writes = static_cast<std::size_t>(uniform(1, writes));
  std::vector<StagedRequest> staged_writes;
  if (writes > 0) {
    // All on one bank by default, each a row miss; the last one leaves the
    // bank on the row its core's staged reads hit.
    const bool spread = o.perturb && coin(0.3);
    const CoreId home = o.perturb ? interferers[uniform(0, interferers.size() - 1)] : interferers.front();
    std::vector<CoreId> owner(writes, home);
    if (spread) {
      for (auto& w : owner) w = interferers[uniform(0, interferers.size() - 1)];
    }
    std::map<CoreId, std::size_t> left;
    for (auto w : owner) ++left[w];
    for (auto& [c, n] : left) {
      // Written rows differ from each other and from the open row.
      s.open_rows[c] = static_cast<Row>((read_row[c] + 256 * (n + 1)) % rows);
    }
    std::map<CoreId, std::size_t> seen;
    for (std::size_t i = 0; i < writes; ++i) {
      const CoreId c = owner[i];
      const std::size_t k = ++seen[c];
      const bool last = k == left[c];
      Row r = static_cast<Row>((read_row[c] + 256 * k) % rows);
      if (last && (!o.perturb || coin(0.8))) r = read_row[c];
      staged_writes.push_back(detail::staged(c, c, r, true));
    }
    s.scheduler.initial_mode = Mode::WriteDrain;
  }
  s.prestage = staged_writes;

  // Staged reads of the interferers, all row hits, round-robin across cores.
  std::vector<std::size_t> count;
  for (std::size_t i = 0; i < interferers.size(); ++i) {
    std::size_t n = kind == GeneratorKind::Latency ? 1 : per_core;
    if (o.perturb) n = static_cast<std::size_t>(uniform(0, n));
    count.push_back(n);
  }
  std::vector<StagedRequest> staged_reads;
  for (std::size_t k = 0; k < per_core; ++k) {
    for (std::size_t i = 0; i < interferers.size(); ++i) {
      const CoreId c = interferers[i];
      if (k < count[i]) staged_reads.push_back(detail::staged(c, c, read_row[c]));
    }
  }
  if (o.perturb && coin(0.5)) std::shuffle(staged_reads.begin(), staged_reads.end(), rng);
  s.prestage.insert(s.prestage.end(), staged_reads.begin(), staged_reads.end());

  // Interferer generators. Writes after staging stay below the write queue
  // capacity so the analyzed read sees a single drain.
  const std::size_t write_room = s.scheduler.write_queue_cap - 1 - writes;
  const std::size_t write_share = write_room / interferers.size();
  for (auto c : interferers) {
    GeneratorSpec g;
    g.kind = kind;
    g.core = c;
    g.bank = c;
    g.start_row = read_row[c];
    g.seed = o.seed;
    if (o.perturb && coin(0.25)) g.rows = RowPolicy::RandomRow;
    switch (kind) {
      case GeneratorKind::BandwidthWrite:
        g.budget = o.perturb ? uniform(0, write_share) : write_share;
        break;
      case GeneratorKind::Stream:
        g.budget = o.perturb ? uniform(0, write_share * g.reads_per_write) : write_share * g.reads_per_write;
        break;
      case GeneratorKind::BandwidthRead:
        g.budget = o.perturb ? uniform(0, 40) : 20;
        break;
      case GeneratorKind::Latency:
        g.budget = o.perturb ? uniform(1, 16) : 8;
        break;
    }
    if (g.budget == 0) continue;
    g.start_cycle = o.perturb ? static_cast<Cycle>(uniform(0, 40)) : 0;
    s.generators.push_back(g);
  }

  // The analyzed core's dependent reads; the first arrives at cycle 0 after
  // everything staged.
  GeneratorSpec a;
  a.kind = GeneratorKind::Latency;
  a.core = o.analyzed_core;
  a.bank = o.analyzed_core;
  a.start_row = read_row[o.analyzed_core];
  a.budget = o.perturb ? uniform(1, 4) : 1;
  a.seed = o.seed;
  if (o.perturb && coin(0.5)) {
    // First access misses the open row.
    a.start_row = static_cast<Row>((read_row[o.analyzed_core] + 1) % rows);
  }
  if (o.perturb && coin(0.3)) a.compute_gap = static_cast<Cycle>(uniform(0, 200));
  s.generators.push_back(a);
  validate(s);
  return s;
}

inline ScenarioSpec build_adversarial(CoreId analyzed_core, GeneratorKind kind, std::uint64_t seed,
                                      bool perturb = false) {
  AdversarialOptions o;
  o.analyzed_core = analyzed_core;
  o.interferer_kind = kind;
  o.seed = seed;
  o.perturb = perturb;
  return build_adversarial(o);
}

}  // namespace memint
