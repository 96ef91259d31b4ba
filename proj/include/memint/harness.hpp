#pragma once

// Experiment plumbing: single-run comparisons of measured delay against all
// three bounds, steady-state sweeps, and the report writers behind the CLI.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "memint/analysis.hpp"
#include "memint/error.hpp"
#include "memint/kv.hpp"
#include "memint/presets.hpp"
#include "memint/scenario.hpp"
#include "memint/simulation.hpp"
#include "memint/trace.hpp"
#include "memint/validate.hpp"

namespace memint {

struct ExperimentReport {
  std::string scenario;
  std::uint64_t seed = 0;
  CoreId core = 0;
  AnalysisInputs inputs;
  KimParams kim;

  DelayBound full;
  DelayBound nowq;
  BaselineBound baseline;

  std::size_t reads = 0;
  Cycle measured_max = 0;
  double measured_mean = 0;

  // Last completion of the analyzed core, contended and alone.
  Cycle contended_cycles = 0;
  Cycle solo_cycles = 0;
  std::optional<double> normalized_measured;
  // (solo + H_i * bound) / solo for each bound.
  std::optional<double> normalized_full;
  std::optional<double> normalized_nowq;
  std::optional<double> normalized_baseline;

  double margin_full = 0;
  double margin_nowq = 0;
  double margin_baseline = 0;
  std::size_t violations_full = 0;
  std::size_t violations_nowq = 0;
  std::size_t violations_baseline = 0;

  std::size_t validation_failures = 0;
};

struct CompareOptions {
  std::optional<std::uint64_t> n_rq;
  std::optional<std::uint64_t> n_wq;
  std::optional<KimParams> kim;
  // Also run the analyzed core alone for the normalized response times.
  bool solo_run = true;
};

struct Comparison {
  ExperimentReport report;
  ScheduleTrace trace;
  BoundReport full;
  ValidationResult validation;
};

// N_rq: prior reads that can sit ahead of one analyzed read, limited by the
// read queue, the global MSHRs and the other cores' per-core caps.
inline std::uint64_t default_n_rq(const ScenarioSpec& s) {
  const std::uint64_t others = s.mshr.per_core_read_cap * (s.num_cores - 1);
  const std::uint64_t room = std::min<std::uint64_t>(s.scheduler.read_queue_cap, s.mshr.global_read_cap) - 1;
  return std::min(others, room);
}

inline AnalysisInputs analysis_inputs(const ScenarioSpec& s, const CompareOptions& o = {}) {
  AnalysisInputs in;
  in.n_rq = o.n_rq.value_or(default_n_rq(s));
  in.n_wq = o.n_wq.value_or(s.scheduler.drain_batch);
  in.n_proc = s.num_cores;
  in.timing = s.timing;
  return in;
}

// The analyzed core's generator and staged requests only, on the same
// configuration.
inline ScenarioSpec solo_spec(const ScenarioSpec& s) {
  if (!s.analyzed_core) throw Error("scenario has no analyzed core");
  const CoreId a = *s.analyzed_core;
  ScenarioSpec solo = s;
  solo.name = s.name + "-solo";
  solo.generators.clear();
  for (const auto& g : s.generators) {
    if (g.core == a) solo.generators.push_back(g);
  }
  solo.prestage.clear();
  for (const auto& p : s.prestage) {
    if (p.core == a) solo.prestage.push_back(p);
  }
  solo.scheduler.initial_mode = Mode::Read;
  return solo;
}

namespace detail {

inline Cycle last_completion(const ScheduleTrace& t, CoreId core) {
  Cycle last = 0;
  for (const auto& c : t.completions) {
    if (c.core == core) last = std::max(last, c.completion_cycle);
  }
  return last;
}

inline double margin(Cycle bound, Cycle measured) {
  return measured > 0 ? static_cast<double>(bound) / static_cast<double>(measured)
                      : std::numeric_limits<double>::infinity();
}

inline std::size_t count_over(const std::vector<MeasuredRead>& reads, Cycle bound) {
  return static_cast<std::size_t>(
      std::count_if(reads.begin(), reads.end(), [&](const MeasuredRead& m) { return m.delay > bound; }));
}

inline std::optional<double> normalized(Cycle solo, std::uint64_t h, Cycle per_request) {
  if (solo <= 0) return std::nullopt;
  return static_cast<double>(solo + static_cast<Cycle>(h) * per_request) / static_cast<double>(solo);
}

}  // namespace detail

inline Comparison compare(const ScenarioSpec& spec, const CompareOptions& o = {}) {
  if (!spec.analyzed_core) throw Error("compare needs a scenario with an analyzed core");
  const CoreId core = *spec.analyzed_core;

  Comparison out;
  out.trace = run(spec);
  out.validation = validate_trace(out.trace);

  auto& r = out.report;
  r.scenario = spec.name;
  r.seed = spec.seed;
  r.core = core;
  r.inputs = analysis_inputs(spec, o);
  r.kim = o.kim.value_or(kim_defaults(spec.timing));

  const auto reads = measured_reads(out.trace, core);
  r.inputs.h_i = reads.size();
  r.full = per_request_bound(r.inputs, BoundVariant::Full);
  r.nowq = per_request_bound(r.inputs, BoundVariant::NoWriteQueue);
  r.baseline = kim_baseline_bound(r.inputs, r.kim);

  out.full = bound_check(reads, r.full.d_p, core);
  r.reads = reads.size();
  r.measured_max = out.full.max_delay;
  r.measured_mean = out.full.mean_delay;
  r.margin_full = detail::margin(r.full.d_p, r.measured_max);
  r.margin_nowq = detail::margin(r.nowq.d_p, r.measured_max);
  r.margin_baseline = detail::margin(r.baseline.per_request, r.measured_max);
  r.violations_full = out.full.violations.size();
  r.violations_nowq = detail::count_over(reads, r.nowq.d_p);
  r.violations_baseline = detail::count_over(reads, r.baseline.per_request);
  r.validation_failures = 0;
  for (const auto& [_, f] : out.validation.by_check) r.validation_failures += f.size();

  r.contended_cycles = detail::last_completion(out.trace, core);
  if (o.solo_run) {
    const auto solo = run(solo_spec(spec));
    r.solo_cycles = detail::last_completion(solo, core);
    r.inputs.c_solo = r.solo_cycles > 0 ? std::optional<Cycle>(r.solo_cycles) : std::nullopt;
    if (r.solo_cycles > 0) {
      r.normalized_measured = static_cast<double>(r.contended_cycles) / static_cast<double>(r.solo_cycles);
      r.normalized_full = detail::normalized(r.solo_cycles, r.inputs.h_i, r.full.d_p);
      r.normalized_nowq = detail::normalized(r.solo_cycles, r.inputs.h_i, r.nowq.d_p);
      r.normalized_baseline = detail::normalized(r.solo_cycles, r.inputs.h_i, r.baseline.per_request);
    }
  }
  return out;
}

struct SteadyStateOptions {
  GeneratorKind kind = GeneratorKind::BandwidthWrite;
  std::size_t interferers = 3;
  std::uint64_t seed = 0;
  // Reads of the analyzed Latency core before the run stops.
  std::uint64_t latency_budget = 500;
};

// Core 0 runs a random-row Latency chain; cores 1..n run unbounded
// interferers of one kind on their private banks.
inline ScenarioSpec build_steady_state(const SteadyStateOptions& o) {
  if (o.interferers < 1 || o.interferers > 15) throw Error("interferer count must be in 1..15");
  ScenarioSpec s;
  s.name = std::string("steady-") + to_string(o.kind) + "-x" + std::to_string(o.interferers);
  s.seed = o.seed;
  s.num_cores = o.interferers + 1;
  s.timing = ddr3_1066();
  s.analyzed_core = 0;
  s.until_core_done = 0;
  for (std::size_t c = 0; c < s.num_cores; ++c) s.core_bank.push_back(static_cast<BankId>(c));

  GeneratorSpec a;
  a.kind = GeneratorKind::Latency;
  a.rows = RowPolicy::RandomRow;
  a.budget = o.latency_budget;
  a.seed = o.seed;
  s.generators.push_back(a);
  for (std::size_t c = 1; c < s.num_cores; ++c) {
    GeneratorSpec g;
    g.kind = o.kind;
    g.core = static_cast<CoreId>(c);
    g.bank = static_cast<BankId>(c);
    g.seed = o.seed;
    // Seeds shift where each interferer starts in its bank.
    g.start_row = static_cast<Row>((100 * c + 37 * o.seed) % g.num_rows);
    s.generators.push_back(g);
  }
  validate(s);
  return s;
}

struct SweepOptions {
  GeneratorKind kind = GeneratorKind::BandwidthWrite;
  std::size_t interferers = 3;
  std::uint64_t first_seed = 0;
  std::uint64_t last_seed = 0;
  std::uint64_t latency_budget = 500;
  // Run the perturbed adversarial family instead of the steady state.
  bool adversarial = false;
  std::optional<BankId> prioritized_bank;
  std::optional<std::size_t> mshr_reserve;
};

// Overlays the CLI's mechanism flags onto a scenario.
inline void apply_mechanisms(ScenarioSpec& s, std::optional<BankId> prioritized_bank,
                             std::optional<std::size_t> mshr_reserve) {
  if (prioritized_bank) s.scheduler.prioritized_bank = prioritized_bank;
  if (mshr_reserve) s.mshr.reserve_per_core = *mshr_reserve;
  validate(s);
}

inline ScenarioSpec sweep_scenario(const SweepOptions& o, std::uint64_t seed) {
  ScenarioSpec s;
  if (o.adversarial) {
    AdversarialOptions a;
    a.interferer_kind = o.kind;
    a.seed = seed;
    a.perturb = true;
    a.num_cores = o.interferers + 1;
    s = build_adversarial(a);
  } else {
    s = build_steady_state({o.kind, o.interferers, seed, o.latency_budget});
  }
  apply_mechanisms(s, o.prioritized_bank, o.mshr_reserve);
  return s;
}

// One report per seed, in seed order.
inline std::vector<ExperimentReport> sweep(const SweepOptions& o) {
  if (o.last_seed < o.first_seed) throw Error("seed range is empty");
  std::vector<ExperimentReport> out;
  for (std::uint64_t seed = o.first_seed; seed <= o.last_seed; ++seed) {
    out.push_back(compare(sweep_scenario(o, seed)).report);
  }
  return out;
}

struct SweepSummary {
  std::size_t runs = 0;
  std::size_t reads = 0;
  Cycle measured_max = 0;
  double measured_mean = 0;
  double normalized_measured_mean = 0;
  std::size_t runs_violating_full = 0;
  std::size_t runs_violating_nowq = 0;
  std::size_t runs_violating_baseline = 0;
  std::size_t violations_full = 0;
  std::size_t violations_nowq = 0;
  std::size_t violations_baseline = 0;
  std::size_t validation_failures = 0;
};

inline SweepSummary summarize(const std::vector<ExperimentReport>& reports) {
  SweepSummary s;
  double mean_sum = 0, norm_sum = 0;
  std::size_t norm_n = 0;
  for (const auto& r : reports) {
    ++s.runs;
    s.reads += r.reads;
    s.measured_max = std::max(s.measured_max, r.measured_max);
    mean_sum += r.measured_mean * static_cast<double>(r.reads);
    if (r.normalized_measured) {
      norm_sum += *r.normalized_measured;
      ++norm_n;
    }
    s.runs_violating_full += r.violations_full > 0;
    s.runs_violating_nowq += r.violations_nowq > 0;
    s.runs_violating_baseline += r.violations_baseline > 0;
    s.violations_full += r.violations_full;
    s.violations_nowq += r.violations_nowq;
    s.violations_baseline += r.violations_baseline;
    s.validation_failures += r.validation_failures;
  }
  if (s.reads) s.measured_mean = mean_sum / static_cast<double>(s.reads);
  if (norm_n) s.normalized_measured_mean = norm_sum / static_cast<double>(norm_n);
  return s;
}

// ---------------------------------------------------------------- writers

namespace detail {

inline std::string fmt(double v, int precision = 3) {
  if (std::isinf(v)) return "inf";
  std::ostringstream o;
  o << std::fixed << std::setprecision(precision) << v;
  return o.str();
}

inline std::string fmt(const std::optional<double>& v, int precision = 3) {
  return v ? fmt(*v, precision) : "-";
}

inline void csv_row(std::ostream& o, const std::string& q, double cycles, const TimingParams& t,
                    int precision = 0) {
  o << q << "," << fmt(cycles, precision) << "," << fmt(t.to_ns(cycles), 2) << "\n";
}

}  // namespace detail

// quantity,cycles,ns
inline std::string bounds_csv(const AnalysisInputs& in, const KimParams& kim) {
  const auto full = per_request_bound(in, BoundVariant::Full);
  const auto nowq = per_request_bound(in, BoundVariant::NoWriteQueue);
  const auto base = kim_baseline_bound(in, kim);
  const auto& t = in.timing;
  std::ostringstream o;
  o << "quantity,cycles,ns\n";
  detail::csv_row(o, "l_rq", static_cast<double>(full.l_rq), t);
  detail::csv_row(o, "l_wq", static_cast<double>(full.l_wq), t);
  detail::csv_row(o, "d_p_full", static_cast<double>(full.d_p), t);
  detail::csv_row(o, "d_p_nowq", static_cast<double>(nowq.d_p), t);
  detail::csv_row(o, "baseline_per_request", static_cast<double>(base.per_request), t);
  detail::csv_row(o, "total_full", static_cast<double>(total_delay(in, full).cycles), t);
  detail::csv_row(o, "total_nowq", static_cast<double>(total_delay(in, nowq).cycles), t);
  detail::csv_row(o, "total_baseline", static_cast<double>(base.total), t);
  if (in.c_solo) {
    detail::csv_row(o, "response_full", static_cast<double>(*total_delay(in, full).response_time), t);
    detail::csv_row(o, "response_nowq", static_cast<double>(*total_delay(in, nowq).response_time), t);
    detail::csv_row(o, "response_baseline", static_cast<double>(*in.c_solo + base.total), t);
  }
  return o.str();
}

inline std::string report_csv(const ExperimentReport& r) {
  const auto& t = r.inputs.timing;
  std::ostringstream o;
  o << bounds_csv(r.inputs, r.kim);
  detail::csv_row(o, "measured_max_delay", static_cast<double>(r.measured_max), t);
  detail::csv_row(o, "measured_mean_delay", r.measured_mean, t, 3);
  detail::csv_row(o, "contended_cycles", static_cast<double>(r.contended_cycles), t);
  detail::csv_row(o, "solo_cycles", static_cast<double>(r.solo_cycles), t);
  return o.str();
}

// key = value lines for stats.txt.
inline std::string report_stats(const ExperimentReport& r) {
  std::ostringstream o;
  o << "report.scenario = " << r.scenario << "\n";
  o << "report.seed = " << r.seed << "\n";
  o << "report.core = " << r.core << "\n";
  o << "report.n_rq = " << r.inputs.n_rq << "\n";
  o << "report.n_wq = " << r.inputs.n_wq << "\n";
  o << "report.n_proc = " << r.inputs.n_proc << "\n";
  o << "report.h_i = " << r.inputs.h_i << "\n";
  o << "report.reads = " << r.reads << "\n";
  o << "report.measured_max = " << r.measured_max << "\n";
  o << "report.measured_mean = " << detail::fmt(r.measured_mean) << "\n";
  o << "report.normalized_measured = " << detail::fmt(r.normalized_measured) << "\n";
  o << "report.normalized_full = " << detail::fmt(r.normalized_full) << "\n";
  o << "report.normalized_nowq = " << detail::fmt(r.normalized_nowq) << "\n";
  o << "report.normalized_baseline = " << detail::fmt(r.normalized_baseline) << "\n";
  o << "report.margin_full = " << detail::fmt(r.margin_full) << "\n";
  o << "report.margin_nowq = " << detail::fmt(r.margin_nowq) << "\n";
  o << "report.margin_baseline = " << detail::fmt(r.margin_baseline) << "\n";
  o << "report.violations_full = " << r.violations_full << "\n";
  o << "report.violations_nowq = " << r.violations_nowq << "\n";
  o << "report.violations_baseline = " << r.violations_baseline << "\n";
  o << "report.validation_failures = " << r.validation_failures << "\n";
  return o.str();
}

namespace detail {

inline void table(std::ostream& o, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w;
  for (const auto& r : rows) {
    if (w.size() < r.size()) w.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
  }
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) o << "  ";
      if (i == 0) o << std::left << std::setw(static_cast<int>(w[i])) << r[i];
      else o << std::right << std::setw(static_cast<int>(w[i])) << r[i];
    }
    o << "\n";
  }
}

}  // namespace detail

// Per-bound rows: per-request cycles, total, calculated normalized response
// time, margin over the measured maximum, violations.
inline std::string report_table(const ExperimentReport& r) {
  std::ostringstream o;
  o << r.scenario << " (seed " << r.seed << ", core " << r.core << ", " << r.reads << " reads, N_rq "
    << r.inputs.n_rq << ", N_wq " << r.inputs.n_wq << ")\n";
  std::vector<std::vector<std::string>> rows{{"", "per-request", "ns", "total", "normalized", "margin", "violations"}};
  auto row = [&](const std::string& name, Cycle per, const std::optional<double>& norm, double margin,
                 std::size_t viol) {
    rows.push_back({name, std::to_string(per), detail::fmt(r.inputs.timing.to_ns(per), 2),
                    std::to_string(static_cast<Cycle>(r.inputs.h_i) * per), detail::fmt(norm), detail::fmt(margin),
                    std::to_string(viol)});
  };
  row("d_p(full)", r.full.d_p, r.normalized_full, r.margin_full, r.violations_full);
  row("d_p(nowq)", r.nowq.d_p, r.normalized_nowq, r.margin_nowq, r.violations_nowq);
  row("baseline*", r.baseline.per_request, r.normalized_baseline, r.margin_baseline, r.violations_baseline);
  rows.push_back({"measured max", std::to_string(r.measured_max), detail::fmt(r.inputs.timing.to_ns(r.measured_max), 2),
                  "-", detail::fmt(r.normalized_measured), "-", "-"});
  rows.push_back({"measured mean", detail::fmt(r.measured_mean, 1), detail::fmt(r.inputs.timing.to_ns(r.measured_mean), 2),
                  "-", "-", "-", "-"});
  detail::table(o, rows);
  o << "* baseline constants L_PRE=" << r.kim.l_pre << " L_ACT=" << r.kim.l_act << " L_RW=" << r.kim.l_rw
    << " are approximations\n";
  if (r.validation_failures) o << "trace validation: " << r.validation_failures << " failures\n";
  return o.str();
}

inline std::string sweep_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream o;
  o << "seed,scenario,reads,measured_max,measured_mean,normalized_measured,d_p_full,d_p_nowq,baseline,"
       "violations_full,violations_nowq,violations_baseline,validation_failures\n";
  for (const auto& r : reports) {
    o << r.seed << "," << r.scenario << "," << r.reads << "," << r.measured_max << ","
      << detail::fmt(r.measured_mean) << "," << detail::fmt(r.normalized_measured) << "," << r.full.d_p << ","
      << r.nowq.d_p << "," << r.baseline.per_request << "," << r.violations_full << "," << r.violations_nowq
      << "," << r.violations_baseline << "," << r.validation_failures << "\n";
  }
  return o.str();
}

inline std::string sweep_stats(const SweepOptions& opt, const SweepSummary& s) {
  std::ostringstream o;
  o << "sweep.kind = " << to_string(opt.kind) << "\n";
  o << "sweep.interferers = " << opt.interferers << "\n";
  o << "sweep.family = " << (opt.adversarial ? "adversarial" : "steady") << "\n";
  o << "sweep.seeds = " << opt.first_seed << ".." << opt.last_seed << "\n";
  o << "sweep.runs = " << s.runs << "\n";
  o << "sweep.reads = " << s.reads << "\n";
  o << "sweep.measured_max = " << s.measured_max << "\n";
  o << "sweep.measured_mean = " << detail::fmt(s.measured_mean) << "\n";
  o << "sweep.normalized_measured_mean = " << detail::fmt(s.normalized_measured_mean) << "\n";
  o << "sweep.runs_violating_full = " << s.runs_violating_full << "\n";
  o << "sweep.runs_violating_nowq = " << s.runs_violating_nowq << "\n";
  o << "sweep.runs_violating_baseline = " << s.runs_violating_baseline << "\n";
  o << "sweep.violations_full = " << s.violations_full << "\n";
  o << "sweep.violations_nowq = " << s.violations_nowq << "\n";
  o << "sweep.violations_baseline = " << s.violations_baseline << "\n";
  o << "sweep.validation_failures = " << s.validation_failures << "\n";
  return o.str();
}

inline std::string sweep_table(const std::vector<ExperimentReport>& reports) {
  std::vector<std::vector<std::string>> rows{
      {"seed", "reads", "max", "mean", "slowdown", "d_p(full)", "d_p(nowq)", "baseline", "viol(full)", "viol(nowq)", "viol(base)"}};
  for (const auto& r : reports) {
    rows.push_back({std::to_string(r.seed), std::to_string(r.reads), std::to_string(r.measured_max),
                    detail::fmt(r.measured_mean, 1), detail::fmt(r.normalized_measured, 2), std::to_string(r.full.d_p),
                    std::to_string(r.nowq.d_p), std::to_string(r.baseline.per_request),
                    std::to_string(r.violations_full), std::to_string(r.violations_nowq),
                    std::to_string(r.violations_baseline)});
  }
  std::ostringstream o;
  detail::table(o, rows);
  return o.str();
}

// Sections [analysis] (n_rq, n_wq, n_proc, h_i, c_solo), [baseline]
// (l_pre, l_act, l_rw) and [timing] (overrides of the defaults).
struct AnalysisConfig {
  AnalysisInputs inputs;
  KimParams kim;
};

inline AnalysisConfig parse_analysis_config(std::string_view text) {
  AnalysisConfig c;
  kv::Map timing = to_map(ddr3_1066());
  // Re-derived from CL, WL and tBURST unless given.
  timing.erase("trtw");
  bool kim_given = false;
  for (const auto& [section, map] : kv::parse_sections(text)) {
    for (const auto& [k, v] : map) {
      auto count = [&] {
        const auto n = kv::to_int(k, v);
        if (n < 0) throw Error("key '" + k + "' must be >= 0");
        return static_cast<std::uint64_t>(n);
      };
      if (section == "analysis" || section.empty()) {
        if (k == "n_rq") c.inputs.n_rq = count();
        else if (k == "n_wq") c.inputs.n_wq = count();
        else if (k == "n_proc") c.inputs.n_proc = count();
        else if (k == "h_i") c.inputs.h_i = count();
        else if (k == "c_solo") c.inputs.c_solo = kv::to_int(k, v);
        else throw Error("unknown analysis field '" + k + "'");
      } else if (section == "baseline") {
        kim_given = true;
        if (k == "l_pre") c.kim.l_pre = kv::to_int(k, v);
        else if (k == "l_act") c.kim.l_act = kv::to_int(k, v);
        else if (k == "l_rw") c.kim.l_rw = kv::to_int(k, v);
        else throw Error("unknown baseline field '" + k + "'");
      } else if (section == "timing") {
        timing[k] = v;
      } else {
        throw Error("unknown section [" + section + "]");
      }
    }
  }
  c.inputs.timing = make_timing(timing);
  if (!kim_given) c.kim = kim_defaults(c.inputs.timing);
  validate(c.inputs);
  validate(c.kim);
  return c;
}

inline std::string analysis_table(const AnalysisConfig& c) {
  const auto& in = c.inputs;
  const auto full = per_request_bound(in, BoundVariant::Full);
  const auto nowq = per_request_bound(in, BoundVariant::NoWriteQueue);
  const auto base = kim_baseline_bound(in, c.kim);
  std::vector<std::vector<std::string>> rows{{"", "per-request", "ns", "total", "normalized"}};
  auto row = [&](const std::string& name, Cycle per) {
    const auto tot = total_delay(in, per);
    rows.push_back({name, std::to_string(per), detail::fmt(in.timing.to_ns(per), 2), std::to_string(tot.cycles),
                    detail::fmt(tot.normalized)});
  };
  row("d_p(full)", full.d_p);
  row("d_p(nowq)", nowq.d_p);
  row("baseline*", base.per_request);
  std::ostringstream o;
  o << "N_rq " << in.n_rq << ", N_wq " << in.n_wq << ", N_proc " << in.n_proc << ", H_i " << in.h_i << "\n";
  o << "L_rq " << full.l_rq << " cycles (" << detail::fmt(full.l_rq_ns, 2) << " ns), L_wq " << full.l_wq
    << " cycles (" << detail::fmt(full.l_wq_ns, 2) << " ns)\n";
  detail::table(o, rows);
  o << "* baseline constants L_PRE=" << c.kim.l_pre << " L_ACT=" << c.kim.l_act << " L_RW=" << c.kim.l_rw
    << " are approximations\n";
  return o.str();
}

// ------------------------------------------------------------ output files

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot open '" + p.string() + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + p.string() + "' failed");
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error("cannot open '" + p.string() + "'");
  std::ostringstream o;
  o << f.rdbuf();
  return o.str();
}

inline void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
}

// trace.csv, stats.txt and scenario.txt for one run.
inline void write_run(const std::filesystem::path& dir, const ScenarioSpec& spec, const ScheduleTrace& t,
                      const std::string& extra_stats = {}) {
  prepare_dir(dir);
  write_file(dir / "scenario.txt", write_scenario(spec));
  write_file(dir / "trace.csv", trace_csv(t));
  write_file(dir / "stats.txt", stats_text(t) + extra_stats);
}

}  // namespace memint
