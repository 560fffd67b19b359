#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "dronegrid/model.hpp"
#include "dronegrid/planner.hpp"

namespace dronegrid {

class BoundError : public Error {
 public:
  using Error::Error;
};

struct OracleLimits {
  std::size_t max_n = 4;
  std::size_t max_m = 3;
  std::size_t max_moves = 6;
};

struct OracleResult {
  bool found = false;  // some admissible sequence clears every deficit
  ExchangePlan plan;   // fewest-move such sequence when found
  std::size_t states_explored = 0;
};

/// Breadth-first search over every admissible move sequence of length up to
/// `max_moves`. Uses its own multiset representation of drone rows so it
/// shares no code path with plan_exchanges beyond the input types.
inline OracleResult oracle_plan(const NetworkState& state, const Topology& topo, const DroneSpec& spec,
                                std::size_t max_moves, const OracleLimits& limits = {}) {
  const std::size_t n = state.n();
  const std::size_t m = state.m();
  if (n > limits.max_n || m > limits.max_m || max_moves > limits.max_moves) {
    throw BoundError("oracle bounds exceeded: n<=" + std::to_string(limits.max_n) + ", m<=" +
                     std::to_string(limits.max_m) + ", moves<=" + std::to_string(limits.max_moves));
  }

  using Rows = std::vector<std::vector<Wh>>;  // each row ascending, occupied drones only
  struct Node {
    std::vector<Wh> base;  // battery minus load
    Rows rows;
    std::vector<ExchangeMove> path;
  };

  Node root;
  root.base.resize(n);
  root.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    root.base[i] = state.bs_energy[i] - state.bs_load[i];
    for (std::size_t j = 0; j < m; ++j)
      if (auto e = state.drones.at(i, j)) root.rows[i].push_back(*e);
    std::sort(root.rows[i].begin(), root.rows[i].end());
  }

  auto net = [](const Node& node, std::size_t i) {
    Wh s = node.base[i];
    for (Wh e : node.rows[i]) s += e;
    return s;
  };
  auto clear = [&](const Node& node) {
    for (std::size_t i = 0; i < n; ++i)
      if (net(node, i) < -kEnergyEpsilon) return false;
    return true;
  };
  auto flight = [&](std::size_t a, std::size_t b) {
    return spec.loss_per_km * topo.distance(a, b) + spec.loss_per_min * spec.hover_minutes;
  };

  auto to_state = [&](const Node& node) {
    NetworkState s = state;
    for (std::size_t i = 0; i < n; ++i) {
      s.bs_energy[i] = node.base[i] + state.bs_load[i];
      const std::size_t empty = m - node.rows[i].size();
      for (std::size_t j = 0; j < m; ++j)
        s.drones.at(i, j) = j < empty ? std::nullopt : std::optional<Wh>(node.rows[i][j - empty]);
    }
    return s;
  };

  OracleResult result;
  auto finish = [&](const Node& node) {
    result.found = true;
    result.plan.moves = node.path;
    result.plan.result_count = node.path.size();
    result.plan.post_state = to_state(node);
    return result;
  };

  if (clear(root)) return finish(root);

  Wh total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += net(root, i);
  if (!(total > static_cast<double>(n) * spec.d0 * static_cast<double>(m))) {
    result.plan.infeasible = true;
    result.plan.post_state = to_state(root);
    return result;
  }

  std::set<std::pair<std::vector<Wh>, Rows>> seen{{root.base, root.rows}};
  std::deque<Node> frontier{root};
  while (!frontier.empty()) {
    Node node = std::move(frontier.front());
    frontier.pop_front();
    ++result.states_explored;
    if (node.path.size() >= max_moves) continue;

    for (std::size_t r = 0; r < n; ++r) {
      const Wh r_net = net(node, r);
      if (!(r_net < -kEnergyEpsilon)) continue;
      for (std::size_t g = 0; g < n; ++g) {
        if (g == r || node.rows[g].empty()) continue;
        const Wh drone = node.rows[g].back();
        const Wh out_cost = flight(g, r);
        if (!(drone - out_cost - spec.d0 > -r_net)) continue;
        if (net(node, g) - drone < 0.0) continue;

        Node child = node;
        ExchangeMove mv;
        mv.from_bs = g;
        mv.to_bs = r;
        mv.drone_slot = m - 1;
        mv.energy_delivered = drone - out_cost;
        mv.transit_loss = out_cost;
        child.rows[g].pop_back();
        if (child.rows[r].size() == m) {
          // weakest drone empties into the recipient battery and flies home
          child.base[r] += child.rows[r].front();
          child.rows[r].erase(child.rows[r].begin());
          child.rows[g].insert(child.rows[g].begin(), 0.0);
          mv.return_slot = 0;
          mv.return_loss = flight(r, g);
        }
        child.rows[r].push_back(mv.energy_delivered);
        std::sort(child.rows[r].begin(), child.rows[r].end());

        if (!seen.insert({child.base, child.rows}).second) continue;
        child.path.push_back(mv);
        if (clear(child)) return finish(child);
        frontier.push_back(std::move(child));
      }
    }
  }
  result.plan.post_state = to_state(root);
  return result;
}

}  // namespace dronegrid
