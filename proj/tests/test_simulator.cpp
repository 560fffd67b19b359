#include <gtest/gtest.h>

#include <numeric>

#include "dronegrid/simulator.hpp"
#include "support.hpp"

using namespace dronegrid;

namespace {

SimulationConfig small_config(CaseId c, std::size_t n, std::size_t m, std::size_t hours) {
  SimulationConfig cfg;
  cfg.case_id = c;
  cfg.n = n;
  cfg.m = m;
  cfg.horizon_hours = hours;
  cfg.charging_policy.night_hours.clear();  // no recharging unless a test asks for it
  return cfg;
}

}  // namespace

TEST(Step, BaselineOutage) {
  const auto cfg = small_config(CaseId::Baseline, 1, 1, 24);
  const auto b = dgtest::flat_bundle(1, 24, 0.0, 5.0);
  auto [next, rec] = step(initial_state(cfg), b, cfg, Topology::grid(1, cfg.drone_spec));
  EXPECT_EQ(rec.outages, std::vector<std::size_t>{0});
  EXPECT_EQ(next.bs_energy[0], 0.0);
  EXPECT_EQ(rec.load_served, 0.0);
  EXPECT_EQ(next.hour, 1u);
}

TEST(Step, StaticSupportDrainsLocalDrones) {
  const auto cfg = small_config(CaseId::StaticDroneSupport, 1, 2, 24);
  const auto b = dgtest::flat_bundle(1, 24, 0.0, 5.0);
  auto s = make_state(1, 2, 0.0, 3.0);
  auto [next, rec] = step(s, b, cfg, Topology::grid(1, cfg.drone_spec));
  EXPECT_TRUE(rec.outages.empty());
  EXPECT_DOUBLE_EQ(next.drones.row_total(0), 1.0);
  EXPECT_EQ(rec.from_drones[0], 5.0);
  EXPECT_TRUE(rec.moves.empty());
}

TEST(Step, OptimalRedistributionTwoStationExample) {
  const auto cfg = small_config(CaseId::OptimalRedistribution, 2, 2, 24);
  TraceBundle b = dgtest::flat_bundle(2, 24, 0.0, 0.0);
  b.load[0].values.assign(24, 3.0);
  auto [next, rec] = step(dgtest::two_bs_example(), b, cfg, Topology::grid(2, cfg.drone_spec));
  ASSERT_EQ(rec.moves.size(), 1u);
  EXPECT_TRUE(rec.outages.empty());
  EXPECT_EQ(rec.energy_transferred, 5.0);
  EXPECT_EQ(rec.transit_loss, 1.0);
  EXPECT_TRUE(rec.deficit_detected);
  EXPECT_EQ(rec.per_bs_net, (std::vector<Wh>{-3.0, 10.0}));
  EXPECT_DOUBLE_EQ(next.drones.row_total(0), 2.0);

  // the same state without redistribution is an outage
  auto cfg2 = cfg;
  cfg2.case_id = CaseId::StaticDroneSupport;
  EXPECT_EQ(step(dgtest::two_bs_example(), b, cfg2, Topology::grid(2, cfg.drone_spec)).second.outages.size(), 1u);
}

TEST(Step, EndOfHorizon) {
  const auto cfg = small_config(CaseId::Baseline, 1, 1, 24);
  const auto b = dgtest::flat_bundle(1, 24, 0.0, 0.0);
  auto s = initial_state(cfg);
  s.hour = 24;
  EXPECT_THROW(step(s, b, cfg, Topology::grid(1, cfg.drone_spec)), EndOfHorizon);
}

TEST(Step, OutageIffServedBelowLoad) {
  auto cfg = small_config(CaseId::OptimalRedistribution, 5, 10, 8760);
  cfg.charging_policy = ChargingPolicy{};
  const auto bundle = synth_traces(cfg, {});
  const auto topo = Topology::grid(cfg.n, cfg.drone_spec);
  std::size_t checked = 0;
  run_case(cfg, bundle, topo, [&](const NetworkState&, const NetworkState& after, const HourRecord& r) {
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const double load = bundle.load_at(i, r.hour);
      const bool out = std::find(r.outages.begin(), r.outages.end(), i) != r.outages.end();
      ASSERT_EQ(out, r.served[i] < load - kEnergyEpsilon) << r.hour;
      ASSERT_GE(after.bs_energy[i], 0.0);
    }
    double delivered = 0;
    for (auto& mv : r.moves) delivered += mv.energy_delivered;
    ASSERT_EQ(delivered, r.energy_transferred);
    ++checked;
  });
  EXPECT_EQ(checked, 8760u);
}

TEST(RunCase, ZeroLoadMeansNoOutages) {
  for (auto c : kAllCases) {
    auto cfg = small_config(c, 3, 2, 500);
    const auto r = run_case(cfg, dgtest::flat_bundle(3, 500, 0.0, 0.0), Topology::grid(3, cfg.drone_spec));
    EXPECT_EQ(r.total_outages, 0u);
    EXPECT_EQ(r.weeks(), 3u);  // 500 h = two full weeks and a partial one
  }
}

TEST(RunCase, DeterministicAndAggregatesConsistently) {
  SimulationConfig cfg;
  const auto bundle = synth_traces(cfg, {});
  const auto topo = Topology::grid(cfg.n, cfg.drone_spec);
  std::size_t hourly_moves = 0;
  const auto a = run_case(cfg, bundle, topo, [&](auto&, auto&, const HourRecord& r) { hourly_moves += r.moves.size(); });
  const auto b = run_case(cfg, bundle, topo);
  EXPECT_TRUE(a.same_metrics(b));
  EXPECT_EQ(a.weeks(), 53u);

  std::size_t outages = 0;
  for (auto& w : a.weekly_outages) outages += std::accumulate(w.begin(), w.end(), std::size_t{0});
  EXPECT_EQ(outages, a.total_outages);
  EXPECT_EQ(std::accumulate(a.weekly_exchanges.begin(), a.weekly_exchanges.end(), std::size_t{0}), a.total_exchanges);
  EXPECT_EQ(hourly_moves, a.total_exchanges);
}

TEST(RunCase, NonRedistributingCasesNeverExchange) {
  SimulationConfig cfg;
  const auto bundle = synth_traces(cfg, {});
  const auto topo = Topology::grid(cfg.n, cfg.drone_spec);
  for (auto c : {CaseId::Baseline, CaseId::StaticDroneSupport}) {
    cfg.case_id = c;
    const auto r = run_case(cfg, bundle, topo);
    EXPECT_EQ(r.total_exchanges, 0u);
    for (auto w : r.weekly_exchanges) EXPECT_EQ(w, 0u);
  }
}

TEST(RunCase, StaticNeverWorseThanBaselinePerStationWeek) {
  for (std::uint64_t seed : {1u, 7u, 13u}) {
    SimulationConfig cfg;
    cfg.rng_seed = seed;
    const auto bundle = synth_traces(cfg, {});
    const auto topo = Topology::grid(cfg.n, cfg.drone_spec);
    cfg.case_id = CaseId::Baseline;
    const auto base = run_case(cfg, bundle, topo);
    cfg.case_id = CaseId::StaticDroneSupport;
    const auto stat = run_case(cfg, bundle, topo);
    for (std::size_t w = 0; w < base.weeks(); ++w)
      for (std::size_t i = 0; i < cfg.n; ++i) EXPECT_LE(stat.weekly_outages[w][i], base.weekly_outages[w][i]);
  }
}

TEST(RunCase, DefaultSeedOrdering) {
  SimulationConfig cfg;
  const auto bundle = synth_traces(cfg, {});
  const auto topo = Topology::grid(cfg.n, cfg.drone_spec);
  std::vector<std::size_t> totals;
  for (auto c : kAllCases) {
    cfg.case_id = c;
    totals.push_back(run_case(cfg, bundle, topo).total_outages);
  }
  EXPECT_LE(totals[2], totals[1]);
  EXPECT_LE(totals[1], totals[0]);
}

TEST(RunCase, ShapeMismatches) {
  auto cfg = small_config(CaseId::Baseline, 3, 1, 24);
  const auto topo = Topology::grid(3, cfg.drone_spec);
  EXPECT_THROW(run_case(cfg, dgtest::flat_bundle(2, 24, 0, 0), topo), ShapeError);
  EXPECT_THROW(run_case(cfg, dgtest::flat_bundle(3, 23, 0, 0), topo), ShapeError);
  EXPECT_THROW(run_case(cfg, dgtest::flat_bundle(3, 24, 0, 0), Topology::grid(2, cfg.drone_spec)), ShapeError);
  cfg.m = 0;
  EXPECT_THROW(run_case(cfg, dgtest::flat_bundle(3, 24, 0, 0), topo), ConfigError);
}

TEST(RunCase, ReductionPercentage) {
  MetricsReport base, run;
  base.total_outages = 200;
  run.total_outages = 20;
  EXPECT_DOUBLE_EQ(outage_reduction_pct(run, base), 90.0);
  base.total_outages = 0;
  EXPECT_EQ(outage_reduction_pct(run, base), 0.0);
}
