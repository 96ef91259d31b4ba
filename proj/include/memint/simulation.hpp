#pragma once

// Drives the controller cycle by cycle against a scenario's generators and
// pre-staged requests, and measures per-request interference delay.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memint/device.hpp"
#include "memint/error.hpp"
#include "memint/generator.hpp"
#include "memint/mshr.hpp"
#include "memint/scenario.hpp"
#include "memint/scheduler.hpp"
#include "memint/trace.hpp"

namespace memint {

class Simulation {
 public:
  explicit Simulation(ScenarioSpec spec)
      : spec_((validate(spec), std::move(spec))),
        ctrl_(spec_.timing, spec_.scheduler, spec_.initial_banks()),
        mshr_(spec_.mshr, spec_.num_cores),
        gen_of_core_(spec_.num_cores, -1) {
    for (const auto& g : spec_.generators) {
      gen_of_core_[g.core] = static_cast<int>(gens_.size());
      gens_.emplace_back(g);
    }
    trace_.timing = spec_.timing;
    trace_.config = spec_.scheduler;
    trace_.initial_banks = ctrl_.banks();
    trace_.num_cores = spec_.num_cores;
    trace_.max_outstanding_reads.assign(spec_.num_cores, 0);
  }

  const ScenarioSpec& spec() const { return spec_; }
  const ControllerState& controller() const { return ctrl_; }
  const MshrFile& mshr() const { return mshr_; }

  ScheduleTrace run() {
    if (ran_) throw Error("Simulation::run called twice");
    ran_ = true;
    stage();
    Cycle last_issue = ctrl_.now();
    while (ctrl_.now() < spec_.horizon) {
      if (done()) break;
      auto out = step(ctrl_, [this](ControllerState&, const std::vector<Completion>& done) {
        for (const auto& c : done) {
          mshr_.release(c.core, c.is_write);
          if (auto* g = generator(c.core)) g->on_complete(c);
          trace_.completions.push_back(c);
        }
        poll_generators();
        track_occupancy();
      });
      if (out.mode_switch) trace_.mode_switches.push_back(*out.mode_switch);
      if (out.issued) {
        trace_.issues.push_back(*out.issued);
        last_issue = ctrl_.now();
      } else if (!ctrl_.read_queue().empty() || !ctrl_.write_queue().empty()) {
        if (ctrl_.now() - last_issue >= spec_.stall_window) {
          throw Error("controller stalled: no command issued for " +
                      std::to_string(spec_.stall_window) + " cycles at cycle " +
                      std::to_string(ctrl_.now()) + " with " +
                      std::to_string(ctrl_.read_queue().size()) + " reads and " +
                      std::to_string(ctrl_.write_queue().size()) + " writes queued");
        }
      } else {
        last_issue = ctrl_.now();
      }
    }
    trace_.total_cycles = ctrl_.now();
    trace_.ended_idle = ctrl_.idle();
    return trace_;
  }

 private:
  Generator* generator(CoreId c) {
    const int i = gen_of_core_[c];
    return i < 0 ? nullptr : &gens_[static_cast<std::size_t>(i)];
  }

  void admit(MemRequest r) {
    if (!mshr_.acquire(r.core, r.is_write)) throw InternalFault("admit without MSHR capacity");
    r.id = next_id_++;
    const BankState bank = ctrl_.banks()[r.bank];
    if (ctrl_.enqueue(r) != EnqueueResult::Accepted) throw InternalFault("admit into a full queue");
    const auto& q = r.is_write ? ctrl_.write_queue() : ctrl_.read_queue();
    trace_.arrivals.push_back({q.back(), bank});
    if (auto* g = generator(r.core)) g->on_admitted(q.back());
    ++admitted_;
  }

  void stage() {
    for (const auto& p : spec_.prestage) {
      if (!mshr_.can_acquire(p.core, p.is_write)) {
        throw Error("prestaged request of core " + std::to_string(p.core) + " exceeds MSHR caps");
      }
      MemRequest r;
      r.core = p.core;
      r.bank = p.bank;
      r.row = p.row;
      r.is_write = p.is_write;
      admit(r);
    }
  }

  void poll_generators() {
    const Cycle now = ctrl_.now();
    for (auto& g : gens_) {
      const CoreId core = g.spec().core;
      Allowance a;
      a.reads = std::min(mshr_.read_allowance(core),
                         ctrl_.config().read_queue_cap - ctrl_.read_queue().size());
      a.writes = std::min(mshr_.write_allowance(),
                          ctrl_.config().write_queue_cap - ctrl_.write_queue().size());
      for (auto& r : g.generate(now, a)) admit(r);
    }
  }

  void track_occupancy() {
    for (std::size_t c = 0; c < spec_.num_cores; ++c) {
      const auto n = mshr_.reads(static_cast<CoreId>(c));
      if (n > spec_.mshr.per_core_read_cap) throw InternalFault("per-core MSHR read cap exceeded");
      trace_.max_outstanding_reads[c] = std::max(trace_.max_outstanding_reads[c], n);
    }
    if (mshr_.total_reads() > spec_.mshr.global_read_cap ||
        mshr_.total_writes() > spec_.mshr.global_write_cap) {
      throw InternalFault("global MSHR cap exceeded");
    }
  }

  bool done() {
    const Cycle now = ctrl_.now();
    if (spec_.until_core_done) {
      auto* g = generator(*spec_.until_core_done);
      if (g) return g->finished(now);
      return admitted_ > 0 && mshr_.reads(*spec_.until_core_done) == 0 &&
             mshr_.writes(*spec_.until_core_done) == 0;
    }
    // An empty workload idles until the horizon.
    if (admitted_ == 0 && gens_.empty()) return false;
    for (const auto& g : gens_) {
      if (!g.drained(now)) return false;
    }
    return ctrl_.idle();
  }

  ScenarioSpec spec_;
  ControllerState ctrl_;
  MshrFile mshr_;
  std::vector<Generator> gens_;
  std::vector<int> gen_of_core_;
  ScheduleTrace trace_;
  RequestId next_id_ = 1;
  std::size_t admitted_ = 0;
  bool ran_ = false;
};

inline ScheduleTrace run(const ScenarioSpec& spec) { return Simulation(spec).run(); }

// Latency of `req` served alone: its bank in state `bank`, every other bank
// idle, an idle channel and empty queues, arriving at `arrival`.
inline Cycle solo_service(const TimingParams& timing, const SchedulerConfig& config,
                          const MemRequest& req, const BankState& bank, Cycle arrival) {
  SchedulerConfig solo = config;
  solo.initial_mode = Mode::Read;
  std::vector<BankState> banks(config.num_banks);
  banks.at(req.bank) = bank;
  ControllerState s(timing, solo, std::move(banks), arrival);
  MemRequest r = req;
  r.arrival_order = 0;
  if (s.enqueue(r) != EnqueueResult::Accepted) throw InternalFault("solo enqueue rejected");
  // A row miss needs at most PRE + ACT + CAS plus the bank's residual timing.
  const Cycle guard = arrival + 10 * (timing.tRC + timing.CL + timing.tBURST) +
                      std::max<Cycle>(0, std::max({bank.earliest_act, bank.earliest_pre,
                                                   bank.earliest_rd, bank.earliest_wr}) -
                                             arrival);
  while (s.now() < guard) {
    auto out = step(s);
    for (const auto& c : out.completions) {
      if (c.id == req.id) return c.completion_cycle - arrival;
    }
  }
  throw InternalFault("solo service did not complete");
}

// Solo service time of a request recorded in the trace, computed from the
// bank snapshot taken at its arrival.
inline Cycle solo_service(const ScheduleTrace& t, RequestId id) {
  const auto* a = t.find_arrival(id);
  if (!a) throw Error("unknown request id " + std::to_string(id));
  return solo_service(t.timing, t.config, a->request, a->bank_at_arrival, a->request.arrival_cycle);
}

// (completion - arrival) - baseline_service.
inline Cycle request_delay(const ScheduleTrace& t, RequestId id, Cycle baseline_service) {
  const auto* c = t.find_completion(id);
  if (!c) {
    if (!t.find_arrival(id)) throw Error("unknown request id " + std::to_string(id));
    throw Error("request " + std::to_string(id) + " did not complete");
  }
  return (c->completion_cycle - c->arrival_cycle) - baseline_service;
}

inline Cycle request_delay(const ScheduleTrace& t, RequestId id) {
  return request_delay(t, id, solo_service(t, id));
}

// The bank's state just before `cycle`, replayed from the trace's issue
// records alone. Agrees with ArrivalRecord::bank_at_arrival.
inline BankState replay_bank_state(const ScheduleTrace& t, BankId bank, Cycle cycle) {
  BankState b = t.initial_banks.at(bank);
  // Only this bank's commands: the partial channel is never stricter than the
  // real one, so every recorded command stays legal.
  ChannelState chan;
  for (const auto& i : t.issues) {
    if (i.cycle >= cycle) break;
    if (i.cmd.bank != bank) continue;
    auto e = apply_command(i.cmd, b, chan, i.cycle, t.timing);
    b = e.bank;
    chan = e.chan;
  }
  return b;
}

struct CoreStats {
  std::size_t reads_completed = 0;
  std::size_t writes_completed = 0;
  Cycle max_read_delay = 0;
  double mean_read_delay = 0;
  Cycle last_completion = 0;
};

inline std::vector<CoreStats> core_stats(const ScheduleTrace& t) {
  std::vector<CoreStats> out(t.num_cores);
  std::vector<double> sum(t.num_cores, 0);
  for (const auto& c : t.completions) {
    auto& s = out.at(c.core);
    s.last_completion = std::max(s.last_completion, c.completion_cycle);
    if (c.is_write) {
      ++s.writes_completed;
      continue;
    }
    ++s.reads_completed;
    const Cycle d = request_delay(t, c.id);
    s.max_read_delay = std::max(s.max_read_delay, d);
    sum[c.core] += static_cast<double>(d);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].reads_completed) out[i].mean_read_delay = sum[i] / static_cast<double>(out[i].reads_completed);
  }
  return out;
}

inline std::string stats_text(const ScheduleTrace& t) {
  std::ostringstream o;
  o << "total_cycles = " << t.total_cycles << "\n";
  o << "requests_enqueued = " << t.arrivals.size() << "\n";
  o << "requests_completed = " << t.completions.size() << "\n";
  o << "commands_issued = " << t.issues.size() << "\n";
  o << "mode_switches = " << t.mode_switches.size() << "\n";
  const auto stats = core_stats(t);
  for (std::size_t c = 0; c < stats.size(); ++c) {
    const auto& s = stats[c];
    o << "core." << c << ".reads_completed = " << s.reads_completed << "\n";
    o << "core." << c << ".writes_completed = " << s.writes_completed << "\n";
    o << "core." << c << ".max_read_delay = " << s.max_read_delay << "\n";
    o << "core." << c << ".mean_read_delay = " << s.mean_read_delay << "\n";
    o << "core." << c << ".max_outstanding_reads = " << t.max_outstanding_reads.at(c) << "\n";
  }
  return o.str();
}

}  // namespace memint
