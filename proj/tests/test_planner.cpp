#include <gtest/gtest.h>

#include <sstream>

#include "dronegrid/planner.hpp"
#include "support.hpp"

using namespace dronegrid;

namespace {

const DroneSpec kSpec{};
const Weights kWeights{};

}  // namespace

TEST(Feasible, Examples) {
  auto s = make_state(2, 2, 10.0, 2.0);
  s.bs_load = {5.0, 5.0};
  EXPECT_TRUE(feasible(s, kSpec, 2, 2));  // 10 + 8 = 18 > 4

  auto z = make_state(3, 2, 4.0, 0.0);
  z.bs_load = {4.0, 4.0, 4.0};
  EXPECT_FALSE(feasible(z, kSpec, 3, 2));

  auto one = make_state(1, 1, 0.0, kSpec.d0);
  EXPECT_FALSE(feasible(one, kSpec, 1, 1));  // d0 > d0 is false
  one.drones.at(0, 0) = kSpec.d0 + 1e-9;
  EXPECT_TRUE(feasible(one, kSpec, 1, 1));
}

TEST(SortDroneRows, AscendingWithEmptyFirst) {
  auto s = make_state(2, 3, 0.0, std::nullopt);
  s.drones.at(0, 0) = 5.0;
  s.drones.at(0, 1) = 1.0;
  s.drones.at(0, 2) = 3.0;
  s.drones.at(1, 1) = 4.0;
  s.drones.at(1, 2) = 2.0;
  const auto sorted = sort_drone_rows(s);
  EXPECT_EQ(sorted.drones.at(0, 0), 1.0);
  EXPECT_EQ(sorted.drones.at(0, 1), 3.0);
  EXPECT_EQ(sorted.drones.at(0, 2), 5.0);
  EXPECT_FALSE(sorted.drones.at(1, 0).has_value());
  EXPECT_EQ(sorted.drones.at(1, 1), 2.0);
  EXPECT_EQ(sorted.drones.at(1, 2), 4.0);
  EXPECT_EQ(sort_drone_rows(sorted), sorted);
  EXPECT_EQ(sorted.bs_energy, s.bs_energy);
}

TEST(PlanExchanges, TwoStationExample) {
  const auto s = dgtest::two_bs_example();
  const auto topo = Topology::grid(2, kSpec);
  const auto plan = plan_exchanges(s, topo, kSpec, kWeights, 7);
  ASSERT_EQ(plan.moves.size(), 1u);
  EXPECT_EQ(plan.result_count, 1u);
  const auto& mv = plan.moves[0];
  EXPECT_EQ(mv.from_bs, 1u);
  EXPECT_EQ(mv.to_bs, 0u);
  EXPECT_EQ(mv.hour, 7u);
  EXPECT_EQ(mv.energy_delivered, 5.0);
  EXPECT_EQ(mv.transit_loss, 1.0);
  EXPECT_FALSE(mv.return_slot.has_value());
  EXPECT_EQ(plan.post_state.net(0), 2.0);
  EXPECT_EQ(plan.post_state.net(1), 4.0);
  EXPECT_EQ(plan.post_state.drones.occupied(1), 0u);
  EXPECT_EQ(plan.min_net_bs, 0u);
  EXPECT_EQ(plan.max_net_bs, 1u);
  EXPECT_FALSE(plan.infeasible);
  EXPECT_TRUE(deficit_free(plan.post_state));
  // cost is scored with the recipient as i and the donor as j
  EXPECT_DOUBLE_EQ(mv.cost_score, decision_cost(0, 1, 7, 1, sort_drone_rows(s), topo, kWeights, kSpec));
}

TEST(PlanExchanges, NoDeficitNoMoves) {
  auto s = make_state(3, 2, 5.0, 10.0);
  s.bs_load = {1.0, 2.0, 3.0};
  const auto plan = plan_exchanges(s, Topology::grid(3, kSpec), kSpec, kWeights, 0);
  EXPECT_TRUE(plan.moves.empty());
  EXPECT_EQ(plan.result_count, 0u);
  EXPECT_FALSE(plan.infeasible);
}

TEST(PlanExchanges, InfeasibleFlag) {
  auto s = make_state(2, 2, 0.0, 0.5);
  s.bs_load = {1.0, 0.0};
  const auto plan = plan_exchanges(s, Topology::grid(2, kSpec), kSpec, kWeights, 0);
  EXPECT_TRUE(plan.infeasible);
  EXPECT_TRUE(plan.moves.empty());
  EXPECT_EQ(plan.post_state.bs_energy, s.bs_energy);
}

TEST(PlanExchanges, GuardRejectsWeakDonor) {
  auto s = dgtest::two_bs_example();
  s.drones.at(1, 1) = 5.0;  // 5 - 1 - 1 = 3, not > 3
  s.bs_energy[1] = 20.0;
  const auto plan = plan_exchanges(s, Topology::grid(2, kSpec), kSpec, kWeights, 0);
  EXPECT_TRUE(plan.moves.empty());
  EXPECT_FALSE(plan.infeasible);
}

TEST(PlanExchanges, DonorMayNotFallIntoDeficit) {
  auto s = dgtest::two_bs_example();
  s.bs_energy[1] = 0.0;
  s.drones.at(1, 0) = 10.0;
  s.drones.at(1, 1) = 10.0;
  s.bs_load[1] = 12.0;  // donor net 8 would drop to -2
  ASSERT_TRUE(feasible(s, kSpec, 2, 2));
  const auto plan = plan_exchanges(s, Topology::grid(2, kSpec), kSpec, kWeights, 0);
  EXPECT_TRUE(plan.moves.empty());
}

TEST(PlanExchanges, SkipsDonorWhoseStrongestFailsGuard) {
  // BS1 is richest but its strongest drone is too weak; BS2 supplies instead.
  auto s = make_state(3, 2, 0.0, std::nullopt);
  s.bs_load = {4.0, 0.0, 0.0};
  s.bs_energy = {0.0, 50.0, 5.0};
  s.drones.at(1, 1) = 3.0;
  s.drones.at(2, 1) = 9.0;
  const auto plan = plan_exchanges(s, Topology::grid(3, kSpec), kSpec, kWeights, 0);
  ASSERT_EQ(plan.moves.size(), 1u);
  EXPECT_EQ(plan.moves[0].from_bs, 2u);
}

TEST(PlanExchanges, FullRecipientSwapsWeakestBack) {
  auto s = make_state(2, 2, 0.0, std::nullopt);
  s.drones.at(0, 0) = 1.0;
  s.drones.at(0, 1) = 2.0;
  s.bs_load = {7.0, 0.0};  // net -4
  s.bs_energy = {0.0, 10.0};
  s.drones.at(1, 0) = 3.0;
  s.drones.at(1, 1) = 8.0;
  const auto plan = plan_exchanges(s, Topology::grid(2, kSpec), kSpec, kWeights, 0);
  ASSERT_EQ(plan.moves.size(), 1u);
  const auto& mv = plan.moves[0];
  EXPECT_EQ(mv.return_slot, 0u);
  EXPECT_EQ(mv.return_loss, 1.0);
  EXPECT_EQ(mv.energy_delivered, 7.0);
  const auto& p = plan.post_state;
  EXPECT_EQ(p.bs_energy[0], 1.0);  // weakest drone discharged
  EXPECT_EQ(p.drones.at(0, 0), 2.0);
  EXPECT_EQ(p.drones.at(0, 1), 7.0);
  EXPECT_EQ(p.drones.at(1, 0), 0.0);  // returned empty
  EXPECT_EQ(p.drones.at(1, 1), 3.0);
  EXPECT_EQ(p.net(0), 3.0);
  EXPECT_EQ(p.total_stored(), s.total_stored() - mv.transit_loss);
}

TEST(PlanExchanges, DeepestDeficitServedFirst) {
  auto s = make_state(3, 1, 0.0, std::nullopt);
  s.bs_load = {2.0, 5.0, 0.0};
  s.bs_energy = {0.0, 0.0, 100.0};
  s.drones.at(2, 0) = 20.0;
  const auto plan = plan_exchanges(s, Topology::grid(3, kSpec), kSpec, kWeights, 0);
  ASSERT_FALSE(plan.moves.empty());
  EXPECT_EQ(plan.moves[0].to_bs, 1u);
}

TEST(PlanExchanges, PropertiesOnRandomStates) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t n = 2 + k % 4, m = 1 + k % 4;
    auto s = dgtest::random_state(rng, n, m, 30.0, k % 2 == 0, 0.3);
    std::uniform_real_distribution<double> spacing(2.0, 6.0);
    const auto topo = Topology::grid(n, kSpec, spacing(rng));
    const auto plan = plan_exchanges(s, topo, kSpec, kWeights, k % 24);
    ASSERT_EQ(plan.result_count, plan.moves.size());
    ASSERT_LE(plan.moves.size(), n * m);

    const double before = s.total_stored();
    const double after = plan.post_state.total_stored();
    ASSERT_NEAR(after, before - plan.total_loss() + [&] {
      double imported = 0;
      for (auto& mv : plan.moves) imported += mv.return_loss;
      return imported;
    }(), 1e-9 * std::max(1.0, before));
    ASSERT_TRUE(validate_state(plan.post_state, topo, DroneSpec{.capacity = 1e9}).ok());

    auto replay = sort_drone_rows(s);
    for (const auto& mv : plan.moves) {
      ASSERT_NE(mv.from_bs, mv.to_bs);
      ASSERT_GE(mv.energy_delivered, 0.0);
      ASSERT_EQ(mv.transit_loss, transit_energy(mv.from_bs, mv.to_bs, topo, kSpec));
      const double drone = mv.energy_delivered + mv.transit_loss;
      ASSERT_GT(drone - mv.transit_loss - kSpec.d0, std::max(0.0, -replay.net(mv.to_bs)));
      auto c = detail::admissible_move(replay, mv.from_bs, mv.to_bs, topo, kSpec);
      ASSERT_TRUE(c);
      const double net_before = replay.net(mv.to_bs);
      detail::apply_move(replay, *c);
      ASSERT_GT(replay.net(mv.to_bs), net_before);
      ASSERT_GE(replay.net(mv.from_bs), 0.0);
    }
    ASSERT_EQ(replay, plan.post_state);
    ASSERT_EQ(plan_exchanges(s, topo, kSpec, kWeights, k % 24).moves, plan.moves);
  }
}

TEST(PlanText, RoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 30.0);
  std::vector<ExchangeMove> moves;
  for (int k = 0; k < 50; ++k) {
    ExchangeMove mv{static_cast<std::size_t>(k), 1, 2, 3, u(rng), u(rng), u(rng), std::nullopt, 0.0};
    if (k % 3 == 0) {
      mv.return_slot = 0;
      mv.return_loss = u(rng);
    }
    moves.push_back(mv);
  }
  std::ostringstream os;
  write_moves(os, moves);
  std::istringstream is(os.str());
  EXPECT_EQ(read_moves(is), moves);
}

TEST(PlanText, RejectsMalformedInput) {
  std::istringstream bad_header("hour,from\n");
  EXPECT_THROW(read_moves(bad_header), Error);
  std::istringstream short_row(std::string(kPlanHeader) + "\n1,2,3\n");
  EXPECT_THROW(read_moves(short_row), Error);
  std::istringstream empty_plan(std::string(kPlanHeader) + "\n");
  EXPECT_TRUE(read_moves(empty_plan).empty());
}
