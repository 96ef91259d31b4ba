#include <gtest/gtest.h>

#include <random>

#include "memint/analysis.hpp"
#include "memint/harness.hpp"
#include "memint/presets.hpp"

using namespace memint;

namespace {

AnalysisInputs inputs(std::uint64_t n_rq, std::uint64_t n_wq) {
  AnalysisInputs in;
  in.n_rq = n_rq;
  in.n_wq = n_wq;
  return in;
}

}  // namespace

TEST(ReadQueueDelay, Examples) {
  EXPECT_EQ(read_queue_delay(inputs(30, 4)), 120);
  EXPECT_EQ(read_queue_delay(inputs(0, 4)), 0);
  EXPECT_EQ(read_queue_delay(inputs(3, 4)), 12);
}

TEST(WriteDrainDelay, Examples) {
  EXPECT_EQ(write_drain_delay(inputs(30, 4)), 112);
  EXPECT_EQ(write_drain_delay(inputs(30, 0)), 4);
  EXPECT_EQ(write_drain_delay(inputs(30, 1)), 31);
}

TEST(PerRequestBound, Defaults) {
  const auto b = per_request_bound(AnalysisInputs{});
  EXPECT_EQ(b.l_rq, 120);
  EXPECT_EQ(b.l_wq, 112);
  EXPECT_EQ(b.d_p, 232);
  EXPECT_NEAR(b.d_p_ns, 433.84, 0.01);
  EXPECT_EQ(per_request_bound(AnalysisInputs{}, BoundVariant::NoWriteQueue).d_p, 120);
  EXPECT_EQ(per_request_bound(inputs(0, 0)).d_p, 4);
}

TEST(PerRequestBound, UnitsFollowTheClock) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto in = inputs(rng() % 64, rng() % 16);
    in.timing.tck_ns = 0.5 + static_cast<double>(rng() % 200) / 100.0;
    for (auto v : {BoundVariant::Full, BoundVariant::NoWriteQueue}) {
      const auto b = per_request_bound(in, v);
      EXPECT_NEAR(b.d_p_ns, static_cast<double>(b.d_p) * in.timing.tck_ns, 1e-9);
      EXPECT_NEAR(b.l_rq_ns, static_cast<double>(b.l_rq) * in.timing.tck_ns, 1e-9);
      EXPECT_NEAR(b.l_wq_ns, static_cast<double>(b.l_wq) * in.timing.tck_ns, 1e-9);
    }
  }
}

TEST(PerRequestBound, FullMinusNoWriteQueueIsTheDrain) {
  for (std::uint64_t rq = 0; rq <= 40; rq += 5) {
    for (std::uint64_t wq = 0; wq <= 16; ++wq) {
      const auto in = inputs(rq, wq);
      const auto diff = per_request_bound(in).d_p - per_request_bound(in, BoundVariant::NoWriteQueue).d_p;
      EXPECT_EQ(diff, static_cast<Cycle>(wq) * in.timing.tRC + in.timing.tWTR);
    }
  }
}

TEST(PerRequestBound, MonotoneInEveryInput) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    auto in = inputs(rng() % 40, rng() % 12);
    in.h_i = rng() % 1000;
    const auto base = per_request_bound(in);
    const auto base_total = total_delay(in, base).cycles;
    std::vector<AnalysisInputs> bumped(6, in);
    ++bumped[0].n_rq;
    ++bumped[1].n_wq;
    ++bumped[2].h_i;
    ++bumped[3].timing.tRC;
    ++bumped[4].timing.tWTR;
    ++bumped[5].timing.tBURST;
    ++bumped[5].timing.tCCD;
    for (auto& b : bumped) {
      b.timing = make_timing(to_map(b.timing));
      const auto up = per_request_bound(b);
      EXPECT_GE(up.d_p, base.d_p);
      EXPECT_GE(per_request_bound(b, BoundVariant::NoWriteQueue).d_p,
                per_request_bound(in, BoundVariant::NoWriteQueue).d_p);
      EXPECT_GE(total_delay(b, up).cycles, base_total);
    }
  }
}

TEST(TotalDelay, Examples) {
  AnalysisInputs in;
  in.h_i = 0;
  EXPECT_EQ(total_delay(in, per_request_bound(in)).cycles, 0);
  in.h_i = 1000;
  EXPECT_EQ(total_delay(in, per_request_bound(in)).cycles, 232000);
  EXPECT_FALSE(total_delay(in, 232).normalized);
  in.c_solo = 232000;
  const auto t = total_delay(in, per_request_bound(in));
  EXPECT_EQ(*t.response_time, 464000);
  EXPECT_DOUBLE_EQ(*t.normalized, 2.0);
}

TEST(TotalDelay, RejectsNonPositiveSoloTime) {
  AnalysisInputs in;
  in.c_solo = 0;
  EXPECT_THROW(per_request_bound(in), Error);
}

TEST(KimBaseline, Examples) {
  AnalysisInputs in;
  in.n_proc = 1;
  EXPECT_EQ(kim_baseline_bound(in, {}).per_request, 0);
  in.n_proc = 4;
  in.h_i = 10;
  const auto b = kim_baseline_bound(in, {});
  EXPECT_EQ(b.per_request, 57);
  EXPECT_EQ(b.total, 570);
  EXPECT_EQ(kim_defaults(in.timing).l_rw, 14);
  in.n_proc = 7;
  EXPECT_EQ(kim_baseline_bound(in, {}).per_request, 2 * 57);
}

TEST(KimBaseline, RejectsNegativeConstants) {
  EXPECT_THROW(kim_baseline_bound(AnalysisInputs{}, KimParams{-1, 4, 14}), Error);
  AnalysisInputs in;
  in.n_proc = 0;
  EXPECT_THROW(kim_baseline_bound(in, {}), Error);
}

TEST(BoundCheck, SoloRunHasNoDelay) {
  const auto s = solo_spec(build_adversarial(0, GeneratorKind::BandwidthRead, 0));
  const auto r = bound_check(run(s), per_request_bound(AnalysisInputs{}), 0);
  EXPECT_EQ(r.max_delay, 0);
  EXPECT_TRUE(std::isinf(r.margin));
  EXPECT_TRUE(r.violations.empty());
}

TEST(BoundCheck, MarginsAndViolations) {
  std::vector<MeasuredRead> reads(3);
  reads[0].delay = 10;
  reads[1].delay = 40;
  reads[2].delay = 25;
  const auto r = bound_check(reads, 30, 2);
  EXPECT_EQ(r.max_delay, 40);
  EXPECT_DOUBLE_EQ(r.mean_delay, 25.0);
  EXPECT_DOUBLE_EQ(r.margin, 0.75);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].delay, 40);
}

TEST(BoundCheck, NoReadsIsAnError) {
  EXPECT_THROW(bound_check(std::vector<MeasuredRead>{}, 10, 0), Error);
  EXPECT_THROW(bound_check(run(preset("fig5")), 66, 3), Error);
}

TEST(BoundCheck, Fig5WithinItsScaledBound) {
  const auto t = run(preset("fig5"));
  const auto b = per_request_bound(inputs(2, 2));
  EXPECT_EQ(b.d_p, 66);
  const auto r = bound_check(t, b, 0);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_GT(r.max_delay, 2 * t.timing.tBURST);
}

TEST(BoundCheck, BaselineUnderestimatesTheAdversary) {
  const auto t = run(build_adversarial(0, GeneratorKind::BandwidthWrite, 0));
  const auto base = kim_baseline_bound(AnalysisInputs{}, {});
  EXPECT_FALSE(bound_check(t, base.per_request, 0).violations.empty());
  EXPECT_TRUE(bound_check(t, per_request_bound(AnalysisInputs{}), 0).violations.empty());
}

TEST(AnalysisConfig, ParsesSections) {
  const auto c = parse_analysis_config(R"(
    [analysis]
    n_rq = 30
    n_wq = 4
    n_proc = 4
    h_i = 1000
    c_solo = 232000
  )");
  EXPECT_EQ(c.inputs.h_i, 1000u);
  EXPECT_EQ(*total_delay(c.inputs, per_request_bound(c.inputs)).normalized, 2.0);
  EXPECT_EQ(c.kim.l_rw, 14);

  const auto d = parse_analysis_config("n_wq = 1\n[timing]\ncl = 9\ntwtr = 6\n[baseline]\nl_rw = 20\n");
  EXPECT_EQ(d.inputs.timing.tRTW, 9 + 4 + 2 - 6);
  EXPECT_EQ(write_drain_delay(d.inputs), 27 + 6);
  EXPECT_EQ(d.kim.l_rw, 20);
  EXPECT_EQ(d.kim.l_act, 4);
}

TEST(AnalysisConfig, RejectsBadInput) {
  EXPECT_THROW(parse_analysis_config("n_rq = -1\n"), Error);
  EXPECT_THROW(parse_analysis_config("n_cores = 4\n"), Error);
  EXPECT_THROW(parse_analysis_config("[weights]\nx = 1\n"), Error);
  EXPECT_THROW(parse_analysis_config("[baseline]\nl_pre = -2\n"), Error);
  EXPECT_THROW(parse_analysis_config("[timing]\ntrc = 2\n"), Error);
  EXPECT_THROW(parse_analysis_config("n_proc = 0\n"), Error);
}
