#pragma once

// Worst-case inter-bank interference bounds for one read request of the core
// under analysis, in a bank- and cache-partitioned system:
//
//   L_rq = N_rq * tBURST              prior reads, fully pipelined
//   L_wq = N_wq * tRC + tWTR          one write-drain batch of row misses
//   D_p  = L_rq + L_wq                per request
//   total = H_i * D_p
//
// and the one-outstanding-request-per-core baseline
//
//   RD_p = (N_proc - 1) * (L_PRE + L_ACT + L_RW),  total = H_i * RD_p.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "memint/error.hpp"
#include "memint/simulation.hpp"
#include "memint/timing.hpp"
#include "memint/trace.hpp"

namespace memint {

struct AnalysisInputs {
  std::uint64_t n_rq = 30;
  std::uint64_t n_wq = 4;
  std::uint64_t n_proc = 4;
  std::uint64_t h_i = 0;
  TimingParams timing = ddr3_1066();
  std::optional<Cycle> c_solo;
};

inline void validate(const AnalysisInputs& in) {
  if (in.n_proc < 1) throw Error("n_proc must be >= 1");
  if (in.c_solo && *in.c_solo <= 0) throw Error("c_solo must be > 0");
  validate(in.timing);
}

enum class BoundVariant : std::uint8_t { Full, NoWriteQueue };

inline const char* to_string(BoundVariant v) { return v == BoundVariant::Full ? "full" : "nowq"; }

struct DelayBound {
  BoundVariant variant = BoundVariant::Full;
  Cycle l_rq = 0;
  Cycle l_wq = 0;
  Cycle d_p = 0;
  double l_rq_ns = 0;
  double l_wq_ns = 0;
  double d_p_ns = 0;
};

struct KimParams {
  // Defaults: a command-bus slot, tRRD, and WL + tBURST + tWTR at DDR3-1066.
  // Approximate values; reports flag them.
  Cycle l_pre = 1;
  Cycle l_act = 4;
  Cycle l_rw = 14;
};

inline void validate(const KimParams& k) {
  if (k.l_pre < 0 || k.l_act < 0 || k.l_rw < 0) throw Error("baseline constants must be >= 0");
}

// tRRD and WL + tBURST + tWTR for the given timing.
inline KimParams kim_defaults(const TimingParams& t) {
  return KimParams{1, t.tRRD, t.WL + t.tBURST + t.tWTR};
}

inline Cycle read_queue_delay(const AnalysisInputs& in) {
  return static_cast<Cycle>(in.n_rq) * in.timing.tBURST;
}

inline Cycle write_drain_delay(const AnalysisInputs& in) {
  return static_cast<Cycle>(in.n_wq) * in.timing.tRC + in.timing.tWTR;
}

inline DelayBound per_request_bound(const AnalysisInputs& in, BoundVariant v = BoundVariant::Full) {
  validate(in);
  DelayBound b;
  b.variant = v;
  b.l_rq = read_queue_delay(in);
  b.l_wq = write_drain_delay(in);
  b.d_p = v == BoundVariant::Full ? b.l_rq + b.l_wq : b.l_rq;
  b.l_rq_ns = in.timing.to_ns(b.l_rq);
  b.l_wq_ns = in.timing.to_ns(b.l_wq);
  b.d_p_ns = in.timing.to_ns(b.d_p);
  return b;
}

struct TotalDelay {
  Cycle cycles = 0;
  std::optional<Cycle> response_time;
  std::optional<double> normalized;
};

inline TotalDelay total_delay(const AnalysisInputs& in, Cycle per_request) {
  TotalDelay t;
  t.cycles = static_cast<Cycle>(in.h_i) * per_request;
  if (in.c_solo) {
    t.response_time = *in.c_solo + t.cycles;
    t.normalized = static_cast<double>(*t.response_time) / static_cast<double>(*in.c_solo);
  }
  return t;
}

inline TotalDelay total_delay(const AnalysisInputs& in, const DelayBound& b) {
  return total_delay(in, b.d_p);
}

struct BaselineBound {
  Cycle per_request = 0;
  Cycle total = 0;
};

inline BaselineBound kim_baseline_bound(const AnalysisInputs& in, const KimParams& kp) {
  validate(in);
  validate(kp);
  BaselineBound b;
  b.per_request = static_cast<Cycle>(in.n_proc - 1) * (kp.l_pre + kp.l_act + kp.l_rw);
  b.total = static_cast<Cycle>(in.h_i) * b.per_request;
  return b;
}

struct MeasuredRead {
  RequestId id = 0;
  Cycle arrival = 0;
  Cycle completion = 0;
  Cycle solo_service = 0;
  Cycle delay = 0;
};

struct BoundReport {
  CoreId core = 0;
  Cycle bound = 0;
  std::vector<MeasuredRead> reads;
  Cycle max_delay = 0;
  double mean_delay = 0;
  // bound / max measured delay; infinite when nothing was delayed.
  double margin = std::numeric_limits<double>::infinity();
  std::vector<MeasuredRead> violations;
};

inline std::vector<MeasuredRead> measured_reads(const ScheduleTrace& t, CoreId core) {
  std::vector<MeasuredRead> out;
  for (const auto& c : t.completions) {
    if (c.core != core || c.is_write) continue;
    MeasuredRead m;
    m.id = c.id;
    m.arrival = c.arrival_cycle;
    m.completion = c.completion_cycle;
    m.solo_service = solo_service(t, c.id);
    m.delay = request_delay(t, c.id, m.solo_service);
    out.push_back(m);
  }
  return out;
}

inline BoundReport bound_check(const std::vector<MeasuredRead>& reads, Cycle bound, CoreId core) {
  if (reads.empty()) {
    throw Error("core " + std::to_string(core) + " has no completed reads to check");
  }
  BoundReport r;
  r.core = core;
  r.bound = bound;
  r.reads = reads;
  double sum = 0;
  for (const auto& m : reads) {
    r.max_delay = std::max(r.max_delay, m.delay);
    sum += static_cast<double>(m.delay);
    if (m.delay > bound) r.violations.push_back(m);
  }
  r.mean_delay = sum / static_cast<double>(reads.size());
  if (r.max_delay > 0) r.margin = static_cast<double>(bound) / static_cast<double>(r.max_delay);
  return r;
}

inline BoundReport bound_check(const ScheduleTrace& t, Cycle bound, CoreId core) {
  return bound_check(measured_reads(t, core), bound, core);
}

inline BoundReport bound_check(const ScheduleTrace& t, const DelayBound& b, CoreId core) {
  return bound_check(t, b.d_p, core);
}

}  // namespace memint
