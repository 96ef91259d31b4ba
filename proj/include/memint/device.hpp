#pragma once

// DDR3 device model: per-bank row-buffer state, channel-wide timing gates,
// and the legality/effect of PRE, ACT, RD and WR commands.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "memint/error.hpp"
#include "memint/timing.hpp"

namespace memint {

using BankId = std::uint32_t;
using Row = std::uint32_t;
using CoreId = std::uint32_t;
using RequestId = std::uint64_t;

inline constexpr Cycle kNever = std::numeric_limits<Cycle>::min() / 4;

enum class CommandKind : std::uint8_t { PRE, ACT, RD, WR };

inline const char* to_string(CommandKind k) {
  switch (k) {
    case CommandKind::PRE: return "PRE";
    case CommandKind::ACT: return "ACT";
    case CommandKind::RD: return "RD";
    case CommandKind::WR: return "WR";
  }
  return "?";
}

inline bool is_cas(CommandKind k) { return k == CommandKind::RD || k == CommandKind::WR; }

// A read or write transaction as seen by the DRAM controller.
struct MemRequest {
  RequestId id = 0;
  CoreId core = 0;
  bool is_write = false;
  BankId bank = 0;
  Row row = 0;
  Cycle arrival_cycle = 0;
  // Controller arrival order; assigned at enqueue.
  std::uint64_t arrival_order = 0;

  bool operator==(const MemRequest&) const = default;
};

struct DramCommand {
  CommandKind kind = CommandKind::RD;
  BankId bank = 0;
  Row row = 0;
  RequestId request_id = 0;
  CoreId core = 0;
  std::uint64_t arrival_order = 0;

  bool operator==(const DramCommand&) const = default;
};

struct BankState {
  std::optional<Row> open_row;
  Cycle earliest_act = kNever;
  Cycle earliest_pre = kNever;
  Cycle earliest_rd = kNever;
  Cycle earliest_wr = kNever;

  bool operator==(const BankState&) const = default;
};

enum class CasKind : std::uint8_t { None, Read, Write };

struct ChannelState {
  // Most recent ACT issue cycles, oldest first; act_count of them are valid.
  std::array<Cycle, 4> recent_acts{kNever, kNever, kNever, kNever};
  int act_count = 0;
  // CAS gates. A single "earliest CAS" cannot express both turnaround
  // directions, so reads and writes are gated separately.
  Cycle earliest_rd_cas = kNever;
  Cycle earliest_wr_cas = kNever;
  Cycle data_bus_busy_until = kNever;
  CasKind last_cas_kind = CasKind::None;

  std::optional<Cycle> last_act() const {
    if (act_count == 0) return std::nullopt;
    return recent_acts[static_cast<std::size_t>(act_count - 1)];
  }

  bool operator==(const ChannelState&) const = default;
};

// Data-bus occupancy [begin, end) for one CAS.
struct DataBurst {
  Cycle begin = 0;
  Cycle end = 0;
  bool is_write = false;

  bool operator==(const DataBurst&) const = default;
};

// Open-page decomposition of a request against the current bank state.
inline std::vector<DramCommand> decompose_request(const MemRequest& req, const BankState& bank) {
  auto make = [&](CommandKind k) {
    return DramCommand{k, req.bank, req.row, req.id, req.core, req.arrival_order};
  };
  const auto cas = make(req.is_write ? CommandKind::WR : CommandKind::RD);
  if (bank.open_row && *bank.open_row == req.row) return {cas};
  if (!bank.open_row) return {make(CommandKind::ACT), cas};
  return {make(CommandKind::PRE), make(CommandKind::ACT), cas};
}

// First command the request needs next, i.e. decompose_request(...).front().
inline DramCommand next_command(const MemRequest& req, const BankState& bank) {
  const CommandKind k = bank.open_row && *bank.open_row == req.row
                            ? (req.is_write ? CommandKind::WR : CommandKind::RD)
                            : (bank.open_row ? CommandKind::PRE : CommandKind::ACT);
  return DramCommand{k, req.bank, req.row, req.id, req.core, req.arrival_order};
}

inline bool command_ready(const DramCommand& cmd, const BankState& bank, const ChannelState& chan,
                          Cycle now, const TimingParams& t) {
  switch (cmd.kind) {
    case CommandKind::PRE:
      return bank.open_row.has_value() && now >= bank.earliest_pre;
    case CommandKind::ACT: {
      if (bank.open_row || now < bank.earliest_act) return false;
      if (auto last = chan.last_act(); last && now < *last + t.tRRD) return false;
      if (chan.act_count == 4 && now < chan.recent_acts[0] + t.tFAW) return false;
      return true;
    }
    case CommandKind::RD:
      return bank.open_row == cmd.row && now >= bank.earliest_rd && now >= chan.earliest_rd_cas &&
             now + t.CL >= chan.data_bus_busy_until;
    case CommandKind::WR:
      return bank.open_row == cmd.row && now >= bank.earliest_wr && now >= chan.earliest_wr_cas &&
             now + t.WL >= chan.data_bus_busy_until;
  }
  return false;
}

struct CommandEffect {
  BankState bank;
  ChannelState chan;
  std::optional<DataBurst> burst;
};

inline CommandEffect apply_command(const DramCommand& cmd, BankState bank, ChannelState chan,
                                   Cycle now, const TimingParams& t) {
  if (!command_ready(cmd, bank, chan, now, t)) {
    throw InternalFault(std::string("apply_command: ") + to_string(cmd.kind) + " to bank " +
                        std::to_string(cmd.bank) + " not ready at cycle " + std::to_string(now));
  }
  std::optional<DataBurst> burst;
  switch (cmd.kind) {
    case CommandKind::PRE:
      bank.open_row.reset();
      bank.earliest_act = std::max(bank.earliest_act, now + t.tRP);
      break;
    case CommandKind::ACT:
      bank.open_row = cmd.row;
      bank.earliest_rd = std::max(bank.earliest_rd, now + t.tRCD);
      bank.earliest_wr = std::max(bank.earliest_wr, now + t.tRCD);
      bank.earliest_pre = std::max(bank.earliest_pre, now + t.tRAS);
      bank.earliest_act = std::max(bank.earliest_act, now + t.tRC);
      if (chan.act_count == 4) {
        std::rotate(chan.recent_acts.begin(), chan.recent_acts.begin() + 1, chan.recent_acts.end());
        chan.recent_acts[3] = now;
      } else {
        chan.recent_acts[static_cast<std::size_t>(chan.act_count++)] = now;
      }
      break;
    case CommandKind::RD:
      bank.earliest_pre = std::max(bank.earliest_pre, now + t.tRTP);
      burst = DataBurst{now + t.CL, now + t.CL + t.tBURST, false};
      chan.earliest_rd_cas = std::max(chan.earliest_rd_cas, now + t.tCCD);
      chan.earliest_wr_cas = std::max(chan.earliest_wr_cas, now + t.tRTW);
      chan.last_cas_kind = CasKind::Read;
      break;
    case CommandKind::WR:
      bank.earliest_pre = std::max(bank.earliest_pre, now + t.WL + t.tBURST + t.tWR);
      burst = DataBurst{now + t.WL, now + t.WL + t.tBURST, true};
      chan.earliest_wr_cas = std::max(chan.earliest_wr_cas, now + t.tCCD);
      chan.earliest_rd_cas = std::max(chan.earliest_rd_cas, now + t.write_to_read());
      chan.last_cas_kind = CasKind::Write;
      break;
  }
  if (burst) chan.data_bus_busy_until = burst->end;
  return {std::move(bank), chan, burst};
}

}  // namespace memint
