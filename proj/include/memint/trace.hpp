#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "memint/device.hpp"
#include "memint/scheduler.hpp"
#include "memint/timing.hpp"

namespace memint {

struct ArrivalRecord {
  MemRequest request;
  // State of the request's bank when it entered the controller.
  BankState bank_at_arrival;

  bool operator==(const ArrivalRecord&) const = default;
};

// Everything a run produced, plus the configuration needed to replay it.
struct ScheduleTrace {
  TimingParams timing;
  SchedulerConfig config;
  std::vector<BankState> initial_banks;
  std::size_t num_cores = 0;

  std::vector<ArrivalRecord> arrivals;
  std::vector<IssueRecord> issues;
  std::vector<Completion> completions;
  std::vector<ModeSwitch> mode_switches;
  Cycle total_cycles = 0;
  // Queues empty and nothing in flight when the run stopped.
  bool ended_idle = false;
  // Highest per-cycle outstanding MSHR read count, per core.
  std::vector<std::size_t> max_outstanding_reads;

  bool operator==(const ScheduleTrace&) const = default;

  const ArrivalRecord* find_arrival(RequestId id) const {
    auto it = std::find_if(arrivals.begin(), arrivals.end(),
                           [&](const ArrivalRecord& a) { return a.request.id == id; });
    return it == arrivals.end() ? nullptr : &*it;
  }

  const Completion* find_completion(RequestId id) const {
    auto it = std::find_if(completions.begin(), completions.end(),
                           [&](const Completion& c) { return c.id == id; });
    return it == completions.end() ? nullptr : &*it;
  }

  std::vector<IssueRecord> issues_of(RequestId id) const {
    std::vector<IssueRecord> out;
    for (const auto& i : issues) {
      if (i.cmd.request_id == id) out.push_back(i);
    }
    return out;
  }
};

// cycle,event,kind,bank,row,core,request_id; completions leave kind and row
// empty. Within a cycle completions precede the issue, matching run order.
inline void write_trace_csv(std::ostream& out, const ScheduleTrace& t) {
  out << "cycle,event,kind,bank,row,core,request_id\n";
  std::size_t i = 0, c = 0;
  while (i < t.issues.size() || c < t.completions.size()) {
    const bool take_completion =
        c < t.completions.size() &&
        (i == t.issues.size() || t.completions[c].completion_cycle <= t.issues[i].cycle);
    if (take_completion) {
      const auto& e = t.completions[c++];
      out << e.completion_cycle << ",complete,," << e.bank << ",," << e.core << "," << e.id << "\n";
    } else {
      const auto& e = t.issues[i++];
      out << e.cycle << ",issue," << to_string(e.cmd.kind) << "," << e.cmd.bank << ","
          << e.cmd.row << "," << e.cmd.core << "," << e.cmd.request_id << "\n";
    }
  }
}

inline std::string trace_csv(const ScheduleTrace& t) {
  std::ostringstream o;
  write_trace_csv(o, t);
  return o.str();
}

}  // namespace memint
