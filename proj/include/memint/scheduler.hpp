#pragma once

// FR-FCFS DRAM controller with separate read/write request buffers, read
// priority and batched write draining. One command may issue per memory
// cycle on the shared command bus.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "memint/device.hpp"
#include "memint/error.hpp"
#include "memint/timing.hpp"

namespace memint {

enum class Mode : std::uint8_t { Read, WriteDrain };

inline const char* to_string(Mode m) { return m == Mode::Read ? "read" : "drain"; }

struct SchedulerConfig {
  std::size_t read_queue_cap = 32;
  std::size_t write_queue_cap = 16;
  // N_wq: writes drained per batch before reads may resume.
  std::size_t drain_batch = 4;
  std::optional<BankId> prioritized_bank;
  bool partitioning = true;
  std::size_t num_banks = 16;
  Mode initial_mode = Mode::Read;

  bool operator==(const SchedulerConfig&) const = default;
};

inline void validate(const SchedulerConfig& c) {
  if (c.read_queue_cap == 0) throw Error("read_queue_cap must be >= 1");
  if (c.write_queue_cap == 0) throw Error("write_queue_cap must be >= 1");
  if (c.drain_batch > c.write_queue_cap) throw Error("drain_batch must not exceed write_queue_cap");
  if (c.num_banks == 0) throw Error("num_banks must be >= 1");
  if (c.prioritized_bank && *c.prioritized_bank >= c.num_banks) {
    throw Error("prioritized_bank out of range");
  }
}

struct IssueRecord {
  Cycle cycle = 0;
  DramCommand cmd;
  Mode mode = Mode::Read;
  std::optional<DataBurst> burst;

  bool operator==(const IssueRecord&) const = default;
};

struct Completion {
  RequestId id = 0;
  CoreId core = 0;
  BankId bank = 0;
  bool is_write = false;
  Cycle arrival_cycle = 0;
  Cycle completion_cycle = 0;

  bool operator==(const Completion&) const = default;
};

struct ModeSwitch {
  Cycle cycle = 0;
  Mode to = Mode::Read;
  // Writes still queued at the moment of the switch.
  std::size_t writes_queued = 0;

  bool operator==(const ModeSwitch&) const = default;
};

enum class EnqueueResult : std::uint8_t { Accepted, QueueFull };

class ControllerState {
 public:
  ControllerState(TimingParams timing, SchedulerConfig config,
                  std::vector<BankState> initial_banks = {}, Cycle start = 0)
      : timing_(std::move(timing)), config_(config), mode_(config.initial_mode), now_(start) {
    validate(timing_);
    validate(config_);
    banks_ = initial_banks.empty() ? std::vector<BankState>(config_.num_banks)
                                   : std::move(initial_banks);
    if (banks_.size() != config_.num_banks) {
      throw Error("initial bank state count does not match num_banks");
    }
  }

  const TimingParams& timing() const { return timing_; }
  const SchedulerConfig& config() const { return config_; }
  const std::vector<MemRequest>& read_queue() const { return read_queue_; }
  const std::vector<MemRequest>& write_queue() const { return write_queue_; }
  const std::vector<BankState>& banks() const { return banks_; }
  const ChannelState& channel() const { return chan_; }
  Mode mode() const { return mode_; }
  std::size_t drained_in_batch() const { return drained_; }
  Cycle now() const { return now_; }
  std::size_t in_flight() const { return in_flight_.size(); }
  bool idle() const { return read_queue_.empty() && write_queue_.empty() && in_flight_.empty(); }

  bool can_accept(bool is_write) const {
    return is_write ? write_queue_.size() < config_.write_queue_cap
                    : read_queue_.size() < config_.read_queue_cap;
  }

  // Appends the request with the next arrival order. Arrival cycle is the
  // current cycle.
  EnqueueResult enqueue(MemRequest req) {
    if (req.bank >= banks_.size()) throw Error("request targets bank out of range");
    if (!can_accept(req.is_write)) return EnqueueResult::QueueFull;
    req.arrival_cycle = now_;
    req.arrival_order = next_order_++;
    (req.is_write ? write_queue_ : read_queue_).push_back(req);
    return EnqueueResult::Accepted;
  }

  // Moves the requests whose data bursts have ended by now out of flight.
  std::vector<Completion> retire() {
    std::vector<Completion> done;
    auto keep = in_flight_.begin();
    for (auto it = in_flight_.begin(); it != in_flight_.end(); ++it) {
      if (it->second <= now_) {
        const auto& r = it->first;
        done.push_back({r.id, r.core, r.bank, r.is_write, r.arrival_cycle, it->second});
      } else {
        *keep++ = std::move(*it);
      }
    }
    in_flight_.erase(keep, in_flight_.end());
    std::sort(done.begin(), done.end(), [](const Completion& a, const Completion& b) {
      return std::tie(a.completion_cycle, a.id) < std::tie(b.completion_cycle, b.id);
    });
    return done;
  }

  // Applies the read/write mode transition rules; returns the switch if any.
  std::optional<ModeSwitch> update_mode() {
    const bool reads = !read_queue_.empty();
    const bool writes = !write_queue_.empty();
    if (mode_ == Mode::Read) {
      if (write_queue_.size() >= config_.write_queue_cap || (!reads && writes)) {
        mode_ = Mode::WriteDrain;
        drained_ = 0;
        return ModeSwitch{now_, mode_, write_queue_.size()};
      }
    } else if (!writes || (drained_ >= config_.drain_batch && reads)) {
      mode_ = Mode::Read;
      return ModeSwitch{now_, mode_, write_queue_.size()};
    }
    return std::nullopt;
  }

  // Next commands of every request in the active mode's queue, with PREs that
  // would close a row an older queued request still hits removed.
  std::vector<DramCommand> candidates() const {
    const auto& q = active_queue();
    std::vector<DramCommand> out;
    out.reserve(q.size());
    for (const auto& r : q) {
      const auto& bank = banks_[r.bank];
      auto cmd = next_command(r, bank);
      if (cmd.kind == CommandKind::PRE) {
        const bool older_hit = std::any_of(q.begin(), q.end(), [&](const MemRequest& o) {
          return o.bank == r.bank && o.arrival_order < r.arrival_order && o.row == *bank.open_row;
        });
        if (older_hit) continue;
      }
      out.push_back(cmd);
    }
    return out;
  }

  // FR-FCFS pick among ready candidates: CAS before RAS, then the prioritized
  // bank, then oldest, then lowest bank index.
  std::optional<DramCommand> select_command() const {
    std::optional<DramCommand> best;
    for (const auto& c : candidates()) {
      if (!command_ready(c, banks_[c.bank], chan_, now_, timing_)) continue;
      if (!best || outranks(c, *best)) best = c;
    }
    return best;
  }

  bool outranks(const DramCommand& a, const DramCommand& b) const {
    if (is_cas(a.kind) != is_cas(b.kind)) return is_cas(a.kind);
    if (config_.prioritized_bank) {
      const bool pa = a.bank == *config_.prioritized_bank;
      const bool pb = b.bank == *config_.prioritized_bank;
      if (pa != pb) return pa;
    }
    if (a.arrival_order != b.arrival_order) return a.arrival_order < b.arrival_order;
    return a.bank < b.bank;
  }

  // Selects and applies one command at the current cycle.
  std::optional<IssueRecord> issue() {
    auto cmd = select_command();
    if (!cmd) return std::nullopt;
    auto effect = apply_command(*cmd, banks_[cmd->bank], chan_, now_, timing_);
    banks_[cmd->bank] = effect.bank;
    chan_ = effect.chan;
    IssueRecord rec{now_, *cmd, mode_, effect.burst};
    if (is_cas(cmd->kind)) {
      auto& q = cmd->kind == CommandKind::WR ? write_queue_ : read_queue_;
      auto it = std::find_if(q.begin(), q.end(),
                             [&](const MemRequest& r) { return r.id == cmd->request_id; });
      if (it == q.end()) throw InternalFault("issued CAS for a request not in its queue");
      in_flight_.emplace_back(*it, effect.burst->end);
      q.erase(it);
      if (cmd->kind == CommandKind::WR) ++drained_;
    }
    return rec;
  }

  void advance() { ++now_; }

 private:
  const std::vector<MemRequest>& active_queue() const {
    return mode_ == Mode::Read ? read_queue_ : write_queue_;
  }

  TimingParams timing_;
  SchedulerConfig config_;
  std::vector<MemRequest> read_queue_;
  std::vector<MemRequest> write_queue_;
  std::vector<std::pair<MemRequest, Cycle>> in_flight_;
  std::vector<BankState> banks_;
  ChannelState chan_;
  Mode mode_;
  std::size_t drained_ = 0;
  std::uint64_t next_order_ = 1;
  Cycle now_ = 0;
};

struct StepOutcome {
  std::vector<Completion> completions;
  std::optional<ModeSwitch> mode_switch;
  std::optional<IssueRecord> issued;
};

// One memory cycle. `between` runs after completions are retired and before
// the mode update, so a caller can feed new arrivals into the same cycle.
template <typename Between>
StepOutcome step(ControllerState& s, Between&& between) {
  StepOutcome out;
  out.completions = s.retire();
  between(s, out.completions);
  out.mode_switch = s.update_mode();
  out.issued = s.issue();
  s.advance();
  return out;
}

inline StepOutcome step(ControllerState& s) {
  return step(s, [](ControllerState&, const std::vector<Completion>&) {});
}

}  // namespace memint
