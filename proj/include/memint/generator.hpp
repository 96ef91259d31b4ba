#pragma once

// Synthetic request generators modelled on the usual interference
// micro-benchmarks: a pointer-chasing latency probe and three bandwidth hogs.

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "memint/device.hpp"
#include "memint/error.hpp"
#include "memint/kv.hpp"
#include "memint/scheduler.hpp"

namespace memint {

enum class GeneratorKind : std::uint8_t { Latency, BandwidthRead, BandwidthWrite, Stream };
enum class RowPolicy : std::uint8_t { SequentialHit, RandomRow };

inline const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Latency: return "latency";
    case GeneratorKind::BandwidthRead: return "bandwidth_read";
    case GeneratorKind::BandwidthWrite: return "bandwidth_write";
    case GeneratorKind::Stream: return "stream";
  }
  return "?";
}

inline GeneratorKind parse_generator_kind(std::string_view s) {
  const auto v = kv::lower(s);
  if (v == "latency") return GeneratorKind::Latency;
  if (v == "bandwidth_read" || v == "bwread" || v == "read") return GeneratorKind::BandwidthRead;
  if (v == "bandwidth_write" || v == "bwwrite" || v == "write") return GeneratorKind::BandwidthWrite;
  if (v == "stream") return GeneratorKind::Stream;
  throw Error("unknown generator kind '" + std::string(s) + "'");
}

inline const char* to_string(RowPolicy p) {
  return p == RowPolicy::SequentialHit ? "sequential" : "random";
}

inline RowPolicy parse_row_policy(std::string_view s) {
  const auto v = kv::lower(s);
  if (v == "sequential" || v == "sequential-hit" || v == "sequential_hit") {
    return RowPolicy::SequentialHit;
  }
  if (v == "random" || v == "random-row" || v == "random_row") return RowPolicy::RandomRow;
  throw Error("unknown row policy '" + std::string(s) + "'");
}

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Latency;
  CoreId core = 0;
  BankId bank = 0;
  RowPolicy rows = RowPolicy::SequentialHit;
  // Logical misses to generate; 0 means unbounded.
  std::uint64_t budget = 0;
  // No new misses at or after this cycle.
  std::optional<Cycle> stop_cycle;
  Cycle start_cycle = 0;
  // Latency only: cycles between a completion and the next dependent miss.
  Cycle compute_gap = 0;
  Row start_row = 0;
  // Consecutive misses per row under SequentialHit (8 KiB row / 64 B line).
  std::uint32_t hits_per_row = 128;
  std::uint32_t num_rows = 32768;
  // Stream: reads per write-back.
  std::uint32_t reads_per_write = 2;
  // Write-backs land this many rows behind the current read stream; 0 keeps
  // them on the open row.
  std::uint32_t writeback_row_offset = 0;
  // Write-backs waiting for a write MSHR; a full buffer stalls new misses.
  std::uint32_t writeback_buffer = 10;
  std::uint64_t seed = 0;

  bool operator==(const GeneratorSpec&) const = default;
};

inline void validate(const GeneratorSpec& g) {
  if (g.hits_per_row == 0) throw Error("hits_per_row must be >= 1");
  if (g.num_rows == 0) throw Error("num_rows must be >= 1");
  if (g.reads_per_write == 0) throw Error("reads_per_write must be >= 1");
  if (g.writeback_buffer == 0) throw Error("writeback_buffer must be >= 1");
  if (g.compute_gap < 0) throw Error("compute_gap must be >= 0");
}

// What the memory system can take from one core this cycle.
struct Allowance {
  std::size_t reads = 0;
  std::size_t writes = 0;
};

class Generator {
 public:
  explicit Generator(GeneratorSpec spec) : spec_(spec), rng_(spec.seed ^ (0x9e3779b97f4a7c15ull * (spec.core + 1))) {
    validate(spec_);
    ready_at_ = spec_.start_cycle;
  }

  const GeneratorSpec& spec() const { return spec_; }
  std::size_t outstanding_reads() const { return outstanding_reads_; }
  std::size_t outstanding_writes() const { return outstanding_writes_; }
  std::uint64_t emitted_misses() const { return misses_; }
  std::size_t buffered_writebacks() const { return writebacks_.size(); }

  bool exhausted(Cycle now) const {
    if (spec_.budget != 0 && misses_ >= spec_.budget) return true;
    return spec_.stop_cycle && now >= *spec_.stop_cycle;
  }

  // No new misses and no buffered write-backs left to emit.
  bool drained(Cycle now) const { return exhausted(now) && writebacks_.empty(); }

  // Done emitting and nothing of ours left in the memory system.
  bool finished(Cycle now) const {
    return drained(now) && outstanding_reads_ == 0 && outstanding_writes_ == 0;
  }

  // Requests (ids unset) this generator wants to issue at `now`, within the
  // allowance. The caller must admit all of them.
  std::vector<MemRequest> generate(Cycle now, Allowance allow) {
    std::vector<MemRequest> out;
    auto read = [&](Row row) { out.push_back(make(false, row)); };
    // Emits now if a write slot is left, otherwise buffers.
    auto write = [&](Row row) {
      if (allow.writes > 0) {
        out.push_back(make(true, row));
        --allow.writes;
      } else {
        writebacks_.push_back(row);
      }
    };
    while (!writebacks_.empty() && allow.writes > 0) {
      out.push_back(make(true, writebacks_.front()));
      writebacks_.pop_front();
      --allow.writes;
    }
    if (now < spec_.start_cycle || exhausted(now)) return out;
    const auto room = [&] { return writebacks_.size() < spec_.writeback_buffer; };

    switch (spec_.kind) {
      case GeneratorKind::Latency:
        if (outstanding_reads_ == 0 && now >= ready_at_ && allow.reads > 0) {
          read(next_row());
          ++misses_;
        }
        break;
      case GeneratorKind::BandwidthRead:
        while (allow.reads > 0 && !exhausted(now)) {
          read(next_row());
          ++misses_;
          --allow.reads;
        }
        break;
      case GeneratorKind::BandwidthWrite:
        // Every miss allocates a line (read) and evicts a dirty one (write).
        while (allow.reads > 0 && room() && !exhausted(now)) {
          const Row r = next_row();
          read(r);
          write(writeback_row(r));
          ++misses_;
          --allow.reads;
        }
        break;
      case GeneratorKind::Stream:
        while (allow.reads > 0 && !exhausted(now)) {
          const bool with_wb = (misses_ + 1) % spec_.reads_per_write == 0;
          if (with_wb && !room()) break;
          const Row r = next_row();
          read(r);
          if (with_wb) write(writeback_row(r));
          ++misses_;
          --allow.reads;
        }
        break;
    }
    return out;
  }

  // Registers a request of this core that entered the controller, whether
  // generated or pre-staged.
  void on_admitted(const MemRequest& r) { ++(r.is_write ? outstanding_writes_ : outstanding_reads_); }

  void on_complete(const Completion& c) {
    auto& n = c.is_write ? outstanding_writes_ : outstanding_reads_;
    if (n == 0) throw InternalFault("generator saw a completion it did not own");
    --n;
    if (!c.is_write) ready_at_ = c.completion_cycle + spec_.compute_gap;
  }

 private:
  MemRequest make(bool is_write, Row row) const {
    MemRequest r;
    r.core = spec_.core;
    r.bank = spec_.bank;
    r.is_write = is_write;
    r.row = row;
    return r;
  }

  Row next_row() {
    if (spec_.rows == RowPolicy::RandomRow) return static_cast<Row>(rng_() % spec_.num_rows);
    return static_cast<Row>((spec_.start_row + misses_ / spec_.hits_per_row) % spec_.num_rows);
  }

  Row writeback_row(Row r) const {
    return static_cast<Row>((r + spec_.num_rows - spec_.writeback_row_offset % spec_.num_rows) %
                            spec_.num_rows);
  }

  GeneratorSpec spec_;
  std::mt19937_64 rng_;
  std::deque<Row> writebacks_;
  std::uint64_t misses_ = 0;
  std::size_t outstanding_reads_ = 0;
  std::size_t outstanding_writes_ = 0;
  Cycle ready_at_ = 0;
};

}  // namespace memint
