// memint: command-line front end for the DRAM interference simulator.
//
//   memint simulate --scenario FILE --out DIR
//   memint preset NAME --out DIR
//   memint analyze --config FILE [--out DIR]
//   memint compare (--scenario FILE | --preset NAME | --adversarial KIND) --out DIR
//   memint sweep --kind K --n N --seeds S0..S1 --out DIR
//
// Exit status: 0 success, 1 input error, 2 usage, 3 trace validation failed,
// 4 internal fault.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "memint/harness.hpp"

namespace fs = std::filesystem;
using namespace memint;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInvalid = 3;
constexpr int kExitFault = 4;

struct Mechanisms {
  std::optional<BankId> prioritized_bank;
  std::optional<std::size_t> mshr_reserve;
};

void add_mechanisms(CLI::App* cmd, Mechanisms& m) {
  cmd->add_option("--prioritized-bank", m.prioritized_bank, "Bank whose commands outrank others of the same class");
  cmd->add_option("--mshr-reserve", m.mshr_reserve, "MSHR read entries reserved for every core");
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const auto v = std::stoull(s);
      return {v, v};
    }
    return {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw Error("bad seed range '" + s + "' (expected S0..S1)");
  }
}

int report_validation(const ValidationResult& v) {
  if (v.ok()) return 0;
  std::cerr << "trace validation failed:\n" << v.summary();
  return kExitInvalid;
}

int run_and_write(ScenarioSpec spec, const Mechanisms& m, const fs::path& out) {
  apply_mechanisms(spec, m.prioritized_bank, m.mshr_reserve);
  const auto trace = run(spec);
  write_run(out, spec, trace);
  std::cout << stats_text(trace);
  return report_validation(validate_trace(trace));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-accurate FR-FCFS DRAM controller simulator and interference bound calculator"};
  app.require_subcommand(1);

  // simulate
  std::string scenario_file;
  fs::path out_dir;
  Mechanisms mech;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file; write trace.csv, stats.txt, scenario.txt");
  simulate->add_option("--scenario", scenario_file, "Scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();
  add_mechanisms(simulate, mech);

  // preset
  std::string preset_name;
  auto* preset_cmd = app.add_subcommand("preset", "Run a preset scenario (fig2, fig3, fig4, fig5)");
  preset_cmd->add_option("name", preset_name, "Preset name")->required();
  preset_cmd->add_option("--out", out_dir, "Output directory")->required();
  add_mechanisms(preset_cmd, mech);

  // analyze
  std::string config_file;
  std::optional<fs::path> analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Compute the analytic bounds from a config file");
  analyze->add_option("--config", config_file, "Analysis config file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", analyze_out, "Also write report.csv here");

  // compare
  std::string cmp_scenario, cmp_preset, cmp_kind;
  std::uint64_t cmp_seed = 0;
  bool cmp_perturb = false;
  std::optional<std::uint64_t> n_rq, n_wq;
  auto* cmp = app.add_subcommand("compare", "One run with measured delays against every bound");
  auto* src_scenario = cmp->add_option("--scenario", cmp_scenario, "Scenario file")->check(CLI::ExistingFile);
  auto* src_preset = cmp->add_option("--preset", cmp_preset, "Preset scenario");
  auto* src_adv = cmp->add_option("--adversarial", cmp_kind, "Adversarial scenario with this interferer kind");
  src_scenario->excludes(src_preset)->excludes(src_adv);
  src_preset->excludes(src_adv);
  cmp->add_option("--seed", cmp_seed, "Adversarial seed");
  cmp->add_flag("--perturb", cmp_perturb, "Randomize the adversarial scenario from the seed");
  cmp->add_option("--n-rq", n_rq, "Override N_rq for the bounds");
  cmp->add_option("--n-wq", n_wq, "Override N_wq for the bounds");
  cmp->add_option("--out", out_dir, "Output directory")->required();
  add_mechanisms(cmp, mech);

  // sweep
  std::string sweep_kind = "bandwidth_write", seeds = "0..9";
  std::size_t n_interferers = 3;
  std::uint64_t budget = 500;
  bool sweep_adv = false;
  auto* sw = app.add_subcommand("sweep", "Seeded runs of one interferer configuration");
  sw->add_option("--kind", sweep_kind, "Interferer kind")->required();
  sw->add_option("--n", n_interferers, "Number of interferers")->check(CLI::Range(1, 15));
  sw->add_option("--seeds", seeds, "Seed range S0..S1");
  sw->add_option("--budget", budget, "Reads of the analyzed core per run (steady state)");
  sw->add_flag("--adversarial", sweep_adv, "Use the perturbed worst-case family instead of the steady state");
  sw->add_option("--out", out_dir, "Output directory")->required();
  add_mechanisms(sw, mech);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      return run_and_write(parse_scenario(read_file(scenario_file)), mech, out_dir);
    }
    if (*preset_cmd) {
      return run_and_write(preset(preset_name), mech, out_dir);
    }
    if (*analyze) {
      const auto cfg = parse_analysis_config(read_file(config_file));
      std::cout << analysis_table(cfg);
      if (analyze_out) {
        prepare_dir(*analyze_out);
        write_file(*analyze_out / "report.csv", bounds_csv(cfg.inputs, cfg.kim));
      }
      return 0;
    }
    if (*cmp) {
      ScenarioSpec spec;
      if (!cmp_scenario.empty()) spec = parse_scenario(read_file(cmp_scenario));
      else if (!cmp_preset.empty()) spec = preset(cmp_preset);
      else if (!cmp_kind.empty()) spec = build_adversarial(0, parse_generator_kind(cmp_kind), cmp_seed, cmp_perturb);
      else throw Error("compare needs --scenario, --preset or --adversarial");
      apply_mechanisms(spec, mech.prioritized_bank, mech.mshr_reserve);
      CompareOptions opt;
      opt.n_rq = n_rq;
      opt.n_wq = n_wq;
      const auto c = compare(spec, opt);
      write_run(out_dir, spec, c.trace, report_stats(c.report));
      write_file(out_dir / "report.csv", report_csv(c.report));
      std::cout << report_table(c.report);
      return report_validation(c.validation);
    }
    if (*sw) {
      SweepOptions opt;
      opt.kind = parse_generator_kind(sweep_kind);
      opt.interferers = n_interferers;
      std::tie(opt.first_seed, opt.last_seed) = parse_seed_range(seeds);
      opt.latency_budget = budget;
      opt.adversarial = sweep_adv;
      opt.prioritized_bank = mech.prioritized_bank;
      opt.mshr_reserve = mech.mshr_reserve;
      const auto reports = sweep(opt);
      const auto summary = summarize(reports);
      prepare_dir(out_dir);
      write_file(out_dir / "scenario.txt", write_scenario(sweep_scenario(opt, opt.first_seed)));
      write_file(out_dir / "report.csv", sweep_csv(reports));
      write_file(out_dir / "stats.txt", sweep_stats(opt, summary));
      std::cout << sweep_table(reports) << sweep_stats(opt, summary);
      return summary.validation_failures ? kExitInvalid : 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InternalFault& e) {
    std::cerr << "internal fault: " << e.what() << "\n";
    return kExitFault;
  }
  return 0;
}
