// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "memint/harness.hpp"
#include "memint/presets.hpp"
#include "memint/validate.hpp"

using namespace memint;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream note;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " [failed: " << what << "]";
    }
  }
};

// Every trace produced along the way, for the invariant criterion.
struct Ledger {
  std::size_t traces = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void add(const ScheduleTrace& t, const std::string& label) {
    ++traces;
    auto v = validate_trace(t);
    v.by_check["snapshots"] = check_arrival_snapshots(t);
    if (!v.ok()) {
      ++failures;
      if (first_failure.empty()) first_failure = label + ": " + v.summary();
    }
  }

  void add(const Comparison& c, const std::string& label) {
    ++traces;
    auto v = c.validation;
    v.by_check["snapshots"] = check_arrival_snapshots(c.trace);
    if (!v.ok()) {
      ++failures;
      if (first_failure.empty()) first_failure = label + ": " + v.summary();
    }
  }
};

Ledger ledger;
std::vector<ScenarioSpec> determinism_specs;

std::string fmt(double v, int p = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", p, v);
  return buf;
}

// Request id of the k-th staged request.
RequestId staged_id(const ScheduleTrace& t, std::size_t k) {
  std::vector<MemRequest> v;
  for (const auto& a : t.arrivals) v.push_back(a.request);
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.arrival_order < b.arrival_order; });
  return v.at(k).id;
}

Cycle issue_cycle(const ScheduleTrace& t, std::size_t staged, CommandKind k) {
  for (const auto& i : t.issues_of(staged_id(t, staged))) {
    if (i.cmd.kind == k) return i.cycle;
  }
  return -1;
}

Cycle completion_of(const ScheduleTrace& t, std::size_t staged) {
  const auto id = staged_id(t, staged);
  for (const auto& c : t.completions) {
    if (c.id == id) return c.completion_cycle;
  }
  return -1;
}

ScheduleTrace traced(const ScenarioSpec& s) {
  auto t = run(s);
  ledger.add(t, s.name);
  determinism_specs.push_back(s);
  return t;
}

Check preset_replays() {
  Check c;
  using K = CommandKind;
  const auto f2 = traced(preset("fig2"));
  std::vector<Cycle> rd;
  for (std::size_t k = 0; k < 4; ++k) rd.push_back(issue_cycle(f2, k, K::RD));
  c.expect(rd == std::vector<Cycle>{0, 4, 8, 12}, "fig2 reads at 0/4/8/12");

  const auto f3 = traced(preset("fig3"));
  c.expect(issue_cycle(f3, 0, K::ACT) == 0 && issue_cycle(f3, 1, K::ACT) == 4, "fig3 ACTs at 0 and 4");
  c.expect(issue_cycle(f3, 0, K::RD) == 7 && issue_cycle(f3, 1, K::RD) == 11, "fig3 reads at 7 and 11");

  const auto f4 = traced(preset("fig4"));
  const Cycle rd3 = issue_cycle(f4, 2, K::RD);
  const Cycle pre1 = issue_cycle(f4, 1, K::PRE);
  c.expect(rd3 == 4 && pre1 > rd3, "fig4 younger row hit at 4 before the older PRE");

  const auto f5 = traced(preset("fig5"));
  const Cycle done3 = completion_of(f5, 4);
  bool after_all = done3 > 0;
  for (std::size_t k = 0; k < 4; ++k) after_all = after_all && completion_of(f5, k) > 0 && completion_of(f5, k) < done3;
  c.expect(after_all, "fig5 analyzed read completes last");

  c.note << " fig2 RD@" << rd[0] << "/" << rd[1] << "/" << rd[2] << "/" << rd[3] << "; fig3 ACT@"
         << issue_cycle(f3, 0, K::ACT) << "/" << issue_cycle(f3, 1, K::ACT) << " RD@" << issue_cycle(f3, 0, K::RD)
         << "/" << issue_cycle(f3, 1, K::RD) << "; fig4 RD3@" << rd3 << " PRE1@" << pre1 << "; fig5 RD3 done@"
         << done3;
  return c;
}

Check analytic_values() {
  Check c;
  const auto b = per_request_bound(AnalysisInputs{});
  c.expect(b.l_rq == 120, "L_rq = 120");
  c.expect(b.l_wq == 112, "L_wq = 112");
  c.expect(b.d_p == 232, "D_p = 232");
  c.expect(std::abs(b.d_p_ns - 433.84) <= 0.01, "D_p = 433.84 ns");
  c.note << " L_rq=" << b.l_rq << " L_wq=" << b.l_wq << " D_p=" << b.d_p << " (" << fmt(b.d_p_ns) << " ns)";
  return c;
}

Check bound_safety() {
  Check c;
  constexpr std::uint64_t kSeeds = 300;
  std::size_t runs = 0, reads = 0, full_violations = 0;
  std::map<GeneratorKind, std::size_t> nowq_runs;
  Cycle worst = 0;
  CompareOptions opt;
  opt.solo_run = false;
  for (auto k : {GeneratorKind::BandwidthWrite, GeneratorKind::Stream, GeneratorKind::BandwidthRead,
                 GeneratorKind::Latency}) {
    nowq_runs[k] = 0;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      const auto spec = build_adversarial(static_cast<CoreId>(seed % 4), k, seed, true);
      const auto cmp = compare(spec, opt);
      ledger.add(cmp, spec.name + " seed " + std::to_string(seed));
      ++runs;
      reads += cmp.report.reads;
      full_violations += cmp.report.violations_full;
      nowq_runs[k] += cmp.report.violations_nowq > 0;
      worst = std::max(worst, cmp.report.measured_max);
    }
  }
  c.expect(runs >= 1000, "at least 1000 scenarios");
  c.expect(full_violations == 0, "no read above D_p(full)");
  c.expect(nowq_runs[GeneratorKind::BandwidthWrite] > 0, "some write scenario exceeds D_p(nowq)");
  c.expect(nowq_runs[GeneratorKind::BandwidthRead] == 0, "no read-only scenario exceeds D_p(nowq)");
  c.note << " " << runs << " scenarios, " << reads << " reads, worst " << worst << " cycles, full violations "
         << full_violations << "; runs over D_p(nowq): bandwidth_write " << nowq_runs[GeneratorKind::BandwidthWrite]
         << ", stream " << nowq_runs[GeneratorKind::Stream] << ", bandwidth_read "
         << nowq_runs[GeneratorKind::BandwidthRead] << ", latency " << nowq_runs[GeneratorKind::Latency];
  return c;
}

Comparison default_adversary() {
  const auto spec = build_adversarial(0, GeneratorKind::BandwidthWrite, 0);
  auto cmp = compare(spec);
  ledger.add(cmp, spec.name);
  determinism_specs.push_back(spec);
  return cmp;
}

Check baseline_direction(const Comparison& cmp) {
  Check c;
  const auto& r = cmp.report;
  c.expect(r.measured_max > r.baseline.per_request, "measured max above the baseline");
  c.note << " measured max " << r.measured_max << " vs baseline " << r.baseline.per_request
         << " cycles, measured/baseline = " << fmt(static_cast<double>(r.measured_max) / static_cast<double>(r.baseline.per_request));
  return c;
}

Check tightness(const Comparison& cmp) {
  Check c;
  const auto& r = cmp.report;
  c.expect(r.full.d_p >= r.measured_max, "D_p(full) covers the measured max");
  c.note << " D_p " << r.full.d_p << " vs measured max " << r.measured_max
         << " cycles, D_p/measured = " << fmt(r.margin_full);
  return c;
}

Check pipelining() {
  Check c;
  for (std::size_t n : {1u, 8u, 30u}) {
    ScenarioSpec s;
    s.name = "pipeline-" + std::to_string(n);
    s.num_cores = 4;
    for (CoreId core = 0; core < 4; ++core) {
      s.core_bank.push_back(core);
      s.open_rows[core] = 5;
    }
    for (std::size_t i = 0; i < n; ++i) s.prestage.push_back({static_cast<CoreId>(i % 4), static_cast<BankId>(i % 4), 5, false});
    const auto t = traced(s);
    std::vector<DataBurst> bursts;
    for (const auto& i : t.issues) {
      if (i.burst) bursts.push_back(*i.burst);
    }
    Cycle busy = 0;
    bool gapless = true;
    for (std::size_t k = 0; k < bursts.size(); ++k) {
      busy += bursts[k].end - bursts[k].begin;
      if (k) gapless = gapless && bursts[k].begin == bursts[k - 1].end;
    }
    const Cycle want = static_cast<Cycle>(n) * t.timing.tBURST;
    const Cycle span = bursts.empty() ? 0 : bursts.back().end - bursts.front().begin;
    c.expect(bursts.size() == n && busy == want && span == want && gapless, "N=" + std::to_string(n));
    c.note << " N=" << n << ": " << busy << " busy cycles over a " << span << "-cycle span;";
  }
  return c;
}

Check interferer_ordering() {
  Check c;
  std::map<GeneratorKind, double> slow;
  for (auto k : {GeneratorKind::BandwidthWrite, GeneratorKind::Stream, GeneratorKind::BandwidthRead,
                 GeneratorKind::Latency}) {
    const auto spec = build_steady_state({k, 3, 0, 500});
    const auto cmp = compare(spec);
    ledger.add(cmp, spec.name);
    slow[k] = cmp.report.normalized_measured.value_or(0);
  }
  c.expect(slow[GeneratorKind::BandwidthWrite] >= slow[GeneratorKind::Stream], "bandwidth_write >= stream");
  c.expect(slow[GeneratorKind::Stream] >= slow[GeneratorKind::BandwidthRead], "stream >= bandwidth_read");
  c.note << " slowdown of the latency core: bandwidth_write " << fmt(slow[GeneratorKind::BandwidthWrite])
         << ", stream " << fmt(slow[GeneratorKind::Stream]) << ", bandwidth_read "
         << fmt(slow[GeneratorKind::BandwidthRead]) << ", latency " << fmt(slow[GeneratorKind::Latency]);
  return c;
}

// Outstanding reads of `core` at every cycle, rebuilt from the trace.
std::size_t peak_reads(const ScheduleTrace& t, CoreId core) {
  std::map<Cycle, int> delta;
  for (const auto& a : t.arrivals) {
    if (a.request.core == core && !a.request.is_write) ++delta[a.request.arrival_cycle];
  }
  for (const auto& x : t.completions) {
    if (x.core == core && !x.is_write) --delta[x.completion_cycle];
  }
  int now = 0, peak = 0;
  for (const auto& [_, d] : delta) {
    now += d;
    peak = std::max(peak, now);
  }
  return static_cast<std::size_t>(peak);
}

Check mshr_contention() {
  Check c;
  auto scenario = [](std::size_t reserve) {
    ScenarioSpec s;
    s.name = "mshr-reserve-" + std::to_string(reserve);
    s.num_cores = 4;
    s.mshr.reserve_per_core = reserve;
    for (CoreId core : {1u, 2u, 3u, 0u}) {
      GeneratorSpec g;
      g.kind = GeneratorKind::BandwidthRead;
      g.core = core;
      g.bank = core;
      g.stop_cycle = 5000;
      s.generators.push_back(g);
    }
    return s;
  };
  const auto plain = traced(scenario(0));
  const auto reserved = traced(scenario(8));
  const auto a = peak_reads(plain, 0);
  const auto b = peak_reads(reserved, 0);
  c.expect(a <= 2 && a == plain.max_outstanding_reads.at(0), "analyzed core held to 2 entries");
  c.expect(b >= 8 && b == reserved.max_outstanding_reads.at(0), "reservation restores 8 entries");
  c.note << " analyzed core peak outstanding reads: " << a << " without reservation, " << b << " with reserve 8";
  return c;
}

Check invariants() {
  Check c;
  std::size_t nondeterministic = 0;
  for (const auto& s : determinism_specs) nondeterministic += !check_determinism(s).empty();
  c.expect(ledger.failures == 0, "validators: " + ledger.first_failure);
  c.expect(nondeterministic == 0, "determinism");
  c.note << " " << ledger.traces << " traces validated (priority, mode exclusion, drain batching, data bus, tFAW, "
            "conservation, snapshots), "
         << ledger.failures << " failing; " << determinism_specs.size() << " scenarios rerun, " << nondeterministic
         << " differed";
  return c;
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&](int n, const std::string& name, Check c) {
    all = all && c.ok;
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << n << " " << name << ":" << c.note.str() << std::endl;
  };
  try {
    report(1, "preset replays", preset_replays());
    report(2, "analytic values", analytic_values());
    report(3, "bound safety", bound_safety());
    const auto adv = default_adversary();
    report(4, "baseline under-estimation", baseline_direction(adv));
    report(5, "tightness", tightness(adv));
    report(6, "pipelining throughput", pipelining());
    report(7, "interferer ordering", interferer_ordering());
    report(8, "MSHR contention", mshr_contention());
    report(9, "invariant suites", invariants());
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return all ? 0 : 1;
}
