#pragma once

#include <algorithm>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dronegrid/detail/text.hpp"
#include "dronegrid/model.hpp"
#include "dronegrid/scoring.hpp"

namespace dronegrid {

/// One drone relocation. The drone leaves `drone_slot` of the donor row and
/// docks at the recipient. When the recipient row has no free slot, its
/// weakest drone first discharges into the recipient battery, then flies
/// back empty into the vacated donor slot on external power: `return_slot`
/// names the recipient slot it left and `return_loss` is the flight energy,
/// imported and burnt in the same hop.
struct ExchangeMove {
  std::size_t hour = 0;
  std::size_t from_bs = 0;
  std::size_t to_bs = 0;
  std::size_t drone_slot = 0;
  Wh energy_delivered = 0.0;
  Wh transit_loss = 0.0;
  double cost_score = 0.0;
  std::optional<std::size_t> return_slot;
  Wh return_loss = 0.0;

  Wh total_loss() const { return transit_loss + return_loss; }

  bool operator==(const ExchangeMove&) const = default;
};

struct ExchangePlan {
  std::vector<ExchangeMove> moves;
  std::size_t result_count = 0;
  NetworkState post_state;
  bool infeasible = false;
  // Deepest-deficit and richest BS when planning started.
  std::optional<std::size_t> min_net_bs;
  std::optional<std::size_t> max_net_bs;

  Wh energy_delivered() const {
    Wh s = 0.0;
    for (const auto& mv : moves) s += mv.energy_delivered;
    return s;
  }
  Wh total_loss() const {
    Wh s = 0.0;
    for (const auto& mv : moves) s += mv.total_loss();
    return s;
  }
};

/// Global precondition for any exchange: sum(E - X + D) > n * d0 * m.
inline bool feasible(const NetworkState& state, const DroneSpec& spec, std::size_t n, std::size_t m) {
  Wh sum = state.drones.total();
  for (std::size_t i = 0; i < state.n(); ++i) sum += state.bs_energy[i] - state.bs_load[i];
  return sum > static_cast<double>(n) * spec.d0 * static_cast<double>(m);
}

/// Sorts every drone row ascending with empty slots first, so the last
/// column holds the strongest drone of each BS.
inline NetworkState sort_drone_rows(NetworkState state) {
  for (std::size_t i = 0; i < state.drones.rows(); ++i) {
    auto row = state.drones.row(i);
    std::stable_sort(row.begin(), row.end(), [](const DroneMatrix::Slot& a, const DroneMatrix::Slot& b) {
      if (!a) return b.has_value();
      if (!b) return false;
      return *a < *b;
    });
  }
  return state;
}

namespace detail {

inline void sort_row(DroneMatrix& drones, std::size_t bs) {
  auto row = drones.row(bs);
  std::stable_sort(row.begin(), row.end(), [](const DroneMatrix::Slot& a, const DroneMatrix::Slot& b) {
    if (!a) return b.has_value();
    if (!b) return false;
    return *a < *b;
  });
}

struct CandidateMove {
  ExchangeMove move;
  std::optional<std::size_t> free_slot;  // recipient slot used when no swap
};

// Rows must be sorted. Returns the move of donor's strongest drone to the
// recipient if it passes the guard and leaves the donor without a deficit.
inline std::optional<CandidateMove> admissible_move(const NetworkState& s, std::size_t donor, std::size_t recipient,
                                                    const Topology& topo, const DroneSpec& spec) {
  const std::size_t m = s.drones.cols();
  if (donor == recipient || m == 0) return std::nullopt;
  const auto& strongest = s.drones.at(donor, m - 1);
  if (!strongest) return std::nullopt;

  const Wh drone = *strongest;
  const Wh cost = transit_energy(donor, recipient, topo, spec);
  const Wh deficit = std::max(0.0, -s.net(recipient));
  if (!(drone - cost - spec.d0 > deficit)) return std::nullopt;

  CandidateMove c;
  c.move.from_bs = donor;
  c.move.to_bs = recipient;
  c.move.drone_slot = m - 1;
  c.move.energy_delivered = drone - cost;
  c.move.transit_loss = cost;

  auto row = s.drones.row(recipient);
  auto free = std::find_if(row.begin(), row.end(), [](const auto& slot) { return !slot.has_value(); });
  if (free != row.end()) {
    c.free_slot = static_cast<std::size_t>(free - row.begin());
  } else {
    c.move.return_slot = 0;
    c.move.return_loss = transit_energy(recipient, donor, topo, spec);
  }
  if (s.net(donor) - drone < 0.0) return std::nullopt;
  return c;
}

inline void apply_move(NetworkState& s, const CandidateMove& c) {
  const auto& mv = c.move;
  auto& donor_slot = s.drones.at(mv.from_bs, mv.drone_slot);
  if (mv.return_slot) {
    auto& weakest = s.drones.at(mv.to_bs, *mv.return_slot);
    s.bs_energy[mv.to_bs] += *weakest;
    weakest = mv.energy_delivered;
    donor_slot = 0.0;
  } else {
    s.drones.at(mv.to_bs, *c.free_slot) = mv.energy_delivered;
    donor_slot = std::nullopt;
  }
  sort_row(s.drones, mv.from_bs);
  sort_row(s.drones, mv.to_bs);
}

}  // namespace detail

/// Greedy max-surplus to deficit drone exchange for one hour. Deficit BSs
/// are visited deepest first and donors richest first (ties to the lowest
/// index); the first admissible pair is executed and the scan restarts.
/// Stops when no deficit remains, no pair is admissible, or n*m moves were
/// made.
inline ExchangePlan plan_exchanges(const NetworkState& state, const Topology& topo, const DroneSpec& spec,
                                   const Weights& w, std::size_t hour, const ScoringModel& model = {}) {
  ExchangePlan plan;
  plan.post_state = sort_drone_rows(state);
  auto& s = plan.post_state;
  const std::size_t n = s.n();
  const std::size_t m = s.m();
  if (n == 0) return plan;

  std::vector<std::size_t> order(n);
  auto by_net = [&](bool ascending) {
    std::vector<Wh> nets(n);
    for (std::size_t i = 0; i < n; ++i) nets[i] = s.net(i);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return ascending ? nets[a] < nets[b] : nets[a] > nets[b];
    });
    return nets;
  };

  by_net(true);
  plan.min_net_bs = order.front();
  by_net(false);
  plan.max_net_bs = order.front();

  if (!feasible(s, spec, n, m)) {
    plan.infeasible = true;
    return plan;
  }

  const std::size_t cap = n * m;
  while (plan.moves.size() < cap) {
    auto nets = by_net(true);
    std::vector<std::size_t> deficits;
    for (auto i : order)
      if (nets[i] < -kEnergyEpsilon) deficits.push_back(i);
    if (deficits.empty()) break;

    by_net(false);
    const std::vector<std::size_t> donors = order;

    std::optional<detail::CandidateMove> chosen;
    for (auto r : deficits) {
      for (auto g : donors) {
        if (g == r) continue;
        chosen = detail::admissible_move(s, g, r, topo, spec);
        if (chosen) break;
      }
      if (chosen) break;
    }
    if (!chosen) break;

    chosen->move.hour = hour;
    chosen->move.cost_score =
        decision_cost(chosen->move.to_bs, chosen->move.from_bs, hour, chosen->move.drone_slot, s, topo, w, spec, model);
    detail::apply_move(s, *chosen);
    plan.moves.push_back(chosen->move);
  }
  plan.result_count = plan.moves.size();
  return plan;
}

inline bool deficit_free(const NetworkState& s) {
  for (std::size_t i = 0; i < s.n(); ++i)
    if (s.net(i) < -kEnergyEpsilon) return false;
  return true;
}

// Plan text form: one header line, then one move per line.
inline constexpr std::string_view kPlanHeader = "hour,from,to,slot,delivered,loss,cost_score,return_slot,return_loss";

inline void write_moves(std::ostream& os, const std::vector<ExchangeMove>& moves) {
  using detail::format_double;
  os << kPlanHeader << '\n';
  for (const auto& mv : moves) {
    os << mv.hour << ',' << mv.from_bs << ',' << mv.to_bs << ',' << mv.drone_slot << ','
       << format_double(mv.energy_delivered) << ',' << format_double(mv.transit_loss) << ','
       << format_double(mv.cost_score) << ',';
    if (mv.return_slot) os << *mv.return_slot;
    os << ',' << format_double(mv.return_loss) << '\n';
  }
}

inline std::vector<ExchangeMove> read_moves(std::istream& is) {
  std::vector<ExchangeMove> out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw Error("plan line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1) {
      if (detail::trim(line) != kPlanHeader) fail("unexpected header");
      continue;
    }
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(detail::trim(line), ',');
    if (f.size() != 9) fail("expected 9 fields");
    ExchangeMove mv;
    auto idx = [&](std::string_view v) {
      auto x = detail::parse_int<std::size_t>(v);
      if (!x) fail("bad integer '" + std::string(v) + "'");
      return *x;
    };
    auto num = [&](std::string_view v) {
      auto x = detail::parse_double(v);
      if (!x) fail("bad number '" + std::string(v) + "'");
      return *x;
    };
    mv.hour = idx(f[0]);
    mv.from_bs = idx(f[1]);
    mv.to_bs = idx(f[2]);
    mv.drone_slot = idx(f[3]);
    mv.energy_delivered = num(f[4]);
    mv.transit_loss = num(f[5]);
    mv.cost_score = num(f[6]);
    if (!f[7].empty()) mv.return_slot = idx(f[7]);
    mv.return_loss = num(f[8]);
    out.push_back(mv);
  }
  if (lineno == 0) fail("empty input");
  return out;
}

}  // namespace dronegrid
