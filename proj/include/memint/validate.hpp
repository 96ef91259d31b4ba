#pragma once

// Trace validators. Each returns a list of human-readable failures; an empty
// list means the property holds. check_schedule() replays the whole run from
// the recorded arrivals with its own candidate enumeration and priority key,
// so it is independent of the scheduler's selection code.

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "memint/device.hpp"
#include "memint/scenario.hpp"
#include "memint/scheduler.hpp"
#include "memint/simulation.hpp"
#include "memint/trace.hpp"

namespace memint {

using Failures = std::vector<std::string>;

namespace detail {

inline std::string at(Cycle c) { return "cycle " + std::to_string(c) + ": "; }

inline DataBurst expected_burst(const IssueRecord& i, const TimingParams& t) {
  const Cycle lat = i.cmd.kind == CommandKind::RD ? t.CL : t.WL;
  return {i.cycle + lat, i.cycle + lat + t.tBURST, i.cmd.kind == CommandKind::WR};
}

}  // namespace detail

// Data-bus reservations never overlap and match the CAS latency.
inline Failures check_data_bus(const ScheduleTrace& t) {
  Failures f;
  std::vector<DataBurst> bursts;
  for (const auto& i : t.issues) {
    if (!is_cas(i.cmd.kind)) continue;
    const auto want = detail::expected_burst(i, t.timing);
    if (!i.burst || !(*i.burst == want)) {
      f.push_back(detail::at(i.cycle) + "recorded burst does not match CAS timing");
    }
    bursts.push_back(want);
  }
  std::sort(bursts.begin(), bursts.end(),
            [](const DataBurst& a, const DataBurst& b) { return a.begin < b.begin; });
  for (std::size_t k = 1; k < bursts.size(); ++k) {
    if (bursts[k].begin < bursts[k - 1].end) {
      f.push_back(detail::at(bursts[k].begin) + "data burst overlaps the previous one ending at " +
                  std::to_string(bursts[k - 1].end));
    }
  }
  return f;
}

// At most four ACTs in any tFAW window, and tRRD between consecutive ACTs.
inline Failures check_activation_windows(const ScheduleTrace& t) {
  Failures f;
  std::vector<Cycle> acts;
  for (const auto& i : t.issues) {
    if (i.cmd.kind == CommandKind::ACT) acts.push_back(i.cycle);
  }
  for (std::size_t k = 1; k < acts.size(); ++k) {
    if (acts[k] - acts[k - 1] < t.timing.tRRD) f.push_back(detail::at(acts[k]) + "ACT violates tRRD");
  }
  for (std::size_t k = 4; k < acts.size(); ++k) {
    if (acts[k] - acts[k - 4] < t.timing.tFAW) {
      f.push_back(detail::at(acts[k]) + "fifth ACT inside one tFAW window");
    }
  }
  return f;
}

// No WR CAS in read mode and no RD CAS during a write drain.
inline Failures check_mode_exclusion(const ScheduleTrace& t) {
  Failures f;
  for (const auto& i : t.issues) {
    if (i.cmd.kind == CommandKind::WR && i.mode != Mode::WriteDrain) {
      f.push_back(detail::at(i.cycle) + "WR issued in read mode");
    }
    if (i.cmd.kind == CommandKind::RD && i.mode != Mode::Read) {
      f.push_back(detail::at(i.cycle) + "RD issued during write drain");
    }
  }
  return f;
}

// Every completed drain period issues at least min(N_wq, writes queued at
// entry) write CAS commands.
inline Failures check_drain_batching(const ScheduleTrace& t) {
  Failures f;
  struct Period {
    Cycle begin;
    std::size_t queued;
  };
  std::optional<Period> open;
  if (t.config.initial_mode == Mode::WriteDrain) {
    std::size_t staged = 0;
    for (const auto& a : t.arrivals) staged += a.request.is_write && a.request.arrival_cycle == 0;
    open = Period{0, staged};
  }
  auto writes_between = [&](Cycle from, Cycle to) {
    std::size_t n = 0;
    for (const auto& i : t.issues) n += i.cmd.kind == CommandKind::WR && i.cycle >= from && i.cycle < to;
    return n;
  };
  for (const auto& s : t.mode_switches) {
    if (s.to == Mode::WriteDrain) {
      open = Period{s.cycle, s.writes_queued};
    } else if (open) {
      const auto need = std::min(t.config.drain_batch, open->queued);
      const auto got = writes_between(open->begin, s.cycle);
      if (got < need) {
        f.push_back(detail::at(s.cycle) + "drain exited after " + std::to_string(got) +
                    " writes, batch requires " + std::to_string(need));
      }
      open.reset();
    }
  }
  return f;
}

// Each arrival completes at most once, at the end of its CAS burst; every
// burst that ended inside the run has a completion, and at quiescence every
// arrival has completed.
inline Failures check_conservation(const ScheduleTrace& t) {
  Failures f;
  std::map<RequestId, Cycle> burst_end;
  for (const auto& i : t.issues) {
    if (is_cas(i.cmd.kind)) {
      if (burst_end.count(i.cmd.request_id)) {
        f.push_back(detail::at(i.cycle) + "second CAS for request " + std::to_string(i.cmd.request_id));
      }
      burst_end[i.cmd.request_id] = detail::expected_burst(i, t.timing).end;
    }
  }
  std::set<RequestId> arrived;
  for (const auto& a : t.arrivals) arrived.insert(a.request.id);
  std::set<RequestId> completed;
  for (const auto& c : t.completions) {
    if (!arrived.count(c.id)) f.push_back("completion for unknown request " + std::to_string(c.id));
    if (!completed.insert(c.id).second) f.push_back("request " + std::to_string(c.id) + " completed twice");
    auto it = burst_end.find(c.id);
    if (it == burst_end.end() || it->second != c.completion_cycle) {
      f.push_back("request " + std::to_string(c.id) + " completion does not match its burst end");
    }
  }
  for (const auto& [id, end] : burst_end) {
    if (end < t.total_cycles && !completed.count(id)) {
      f.push_back("request " + std::to_string(id) + " finished its burst at cycle " + std::to_string(end) +
                  " but never completed");
    }
  }
  if (t.ended_idle && completed.size() != arrived.size()) {
    f.push_back("run ended idle with " + std::to_string(arrived.size()) + " arrivals but " +
                std::to_string(completed.size()) + " completions");
  }
  return f;
}

// Full replay: mode transitions follow the switching rules, every issued
// command is the highest-priority ready candidate, and a command issues
// whenever one is ready (work conservation).
inline Failures check_schedule(const ScheduleTrace& t) {
  Failures f;
  const auto& tm = t.timing;
  const auto& cfg = t.config;
  std::vector<BankState> banks = t.initial_banks;
  ChannelState chan;
  std::vector<MemRequest> reads, writes;
  Mode mode = cfg.initial_mode;
  std::size_t drained = 0;

  std::vector<MemRequest> arrivals;
  for (const auto& a : t.arrivals) arrivals.push_back(a.request);
  std::sort(arrivals.begin(), arrivals.end(),
            [](const MemRequest& a, const MemRequest& b) { return a.arrival_order < b.arrival_order; });

  // Larger key wins.
  auto key = [&](const DramCommand& c) {
    const bool prio = cfg.prioritized_bank && c.bank == *cfg.prioritized_bank;
    return std::make_tuple(is_cas(c.kind), prio, -static_cast<std::int64_t>(c.arrival_order),
                           -static_cast<std::int64_t>(c.bank));
  };

  std::size_t next_arrival = 0, next_issue = 0, next_switch = 0;
  for (Cycle now = 0; now < t.total_cycles && f.size() < 20; ++now) {
    while (next_arrival < arrivals.size() && arrivals[next_arrival].arrival_cycle == now) {
      const auto& r = arrivals[next_arrival++];
      (r.is_write ? writes : reads).push_back(r);
    }
    // Mode rules.
    std::optional<Mode> want;
    if (mode == Mode::Read) {
      if (writes.size() >= cfg.write_queue_cap || (reads.empty() && !writes.empty())) want = Mode::WriteDrain;
    } else if (writes.empty() || (drained >= cfg.drain_batch && !reads.empty())) {
      want = Mode::Read;
    }
    const bool recorded = next_switch < t.mode_switches.size() && t.mode_switches[next_switch].cycle == now;
    if (want.has_value() != recorded || (want && *want != t.mode_switches[next_switch].to)) {
      f.push_back(detail::at(now) + "mode transition differs from the switching rules");
    }
    if (recorded) ++next_switch;
    if (want) {
      mode = *want;
      if (mode == Mode::WriteDrain) drained = 0;
    }

    // Candidates.
    const auto& q = mode == Mode::Read ? reads : writes;
    std::optional<DramCommand> best;
    for (const auto& r : q) {
      const auto cmd = decompose_request(r, banks[r.bank]).front();
      if (cmd.kind == CommandKind::PRE) {
        bool blocked = false;
        for (const auto& o : q) {
          blocked |= o.bank == r.bank && o.arrival_order < r.arrival_order && banks[r.bank].open_row == o.row;
        }
        if (blocked) continue;
      }
      if (!command_ready(cmd, banks[cmd.bank], chan, now, tm)) continue;
      if (!best || key(cmd) > key(*best)) best = cmd;
    }

    const bool issued = next_issue < t.issues.size() && t.issues[next_issue].cycle == now;
    if (!issued) {
      if (best) {
        f.push_back(detail::at(now) + "no command issued although " + to_string(best->kind) +
                    " for request " + std::to_string(best->request_id) + " was ready");
      }
      continue;
    }
    const auto& rec = t.issues[next_issue++];
    if (!best || !(rec.cmd == *best)) {
      std::ostringstream o;
      o << detail::at(now) << "issued " << to_string(rec.cmd.kind) << " for request "
        << rec.cmd.request_id;
      if (best) o << " but " << to_string(best->kind) << " for request " << best->request_id << " ranks higher";
      else o << " but no candidate was ready";
      f.push_back(o.str());
    }
    if (rec.mode != mode) f.push_back(detail::at(now) + "issue record carries the wrong mode");
    try {
      auto e = apply_command(rec.cmd, banks[rec.cmd.bank], chan, now, tm);
      banks[rec.cmd.bank] = e.bank;
      chan = e.chan;
    } catch (const InternalFault& err) {
      f.push_back(detail::at(now) + "illegal command: " + err.what());
      break;
    }
    if (is_cas(rec.cmd.kind)) {
      auto& qq = rec.cmd.kind == CommandKind::WR ? writes : reads;
      auto it = std::find_if(qq.begin(), qq.end(),
                             [&](const MemRequest& r) { return r.id == rec.cmd.request_id; });
      if (it == qq.end()) {
        f.push_back(detail::at(now) + "CAS for a request that is not pending");
      } else {
        qq.erase(it);
      }
      if (rec.cmd.kind == CommandKind::WR) ++drained;
    }
  }
  if (next_issue != t.issues.size() && f.empty()) f.push_back("issue records past the end of the run");
  return f;
}

// Bank snapshots stored at arrival agree with a replay of the issue records.
inline Failures check_arrival_snapshots(const ScheduleTrace& t) {
  Failures f;
  for (const auto& a : t.arrivals) {
    if (!(replay_bank_state(t, a.request.bank, a.request.arrival_cycle) == a.bank_at_arrival)) {
      f.push_back("request " + std::to_string(a.request.id) + " bank snapshot does not match replay");
    }
  }
  return f;
}

struct ValidationResult {
  std::map<std::string, Failures> by_check;

  bool ok() const {
    return std::all_of(by_check.begin(), by_check.end(), [](const auto& kv) { return kv.second.empty(); });
  }

  std::string summary() const {
    std::ostringstream o;
    for (const auto& [name, fails] : by_check) {
      for (const auto& x : fails) o << name << ": " << x << "\n";
    }
    return o.str();
  }
};

inline ValidationResult validate_trace(const ScheduleTrace& t) {
  ValidationResult r;
  r.by_check["data_bus"] = check_data_bus(t);
  r.by_check["tfaw"] = check_activation_windows(t);
  r.by_check["mode_exclusion"] = check_mode_exclusion(t);
  r.by_check["drain_batching"] = check_drain_batching(t);
  r.by_check["conservation"] = check_conservation(t);
  r.by_check["priority"] = check_schedule(t);
  return r;
}

// Runs the scenario twice and compares everything recorded.
inline Failures check_determinism(const ScenarioSpec& spec) {
  const auto a = run(spec);
  const auto b = run(spec);
  if (a == b && trace_csv(a) == trace_csv(b)) return {};
  return {"two runs of scenario '" + spec.name + "' produced different traces"};
}

}  // namespace memint
