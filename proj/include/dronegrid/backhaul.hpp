#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "dronegrid/model.hpp"
#include "dronegrid/scoring.hpp"

namespace dronegrid {

enum class BackhaulChoice { DroneBackhaul, TerrestrialRoute, Defer };
enum class BackhaulReason { SufficientReserve, AllDronesLow, DepletionRisk };

inline std::string_view to_string(BackhaulChoice c) {
  switch (c) {
    case BackhaulChoice::DroneBackhaul: return "drone";
    case BackhaulChoice::TerrestrialRoute: return "terrestrial";
    case BackhaulChoice::Defer: return "defer";
  }
  return "unknown";
}

struct BackhaulDecision {
  BackhaulChoice choice = BackhaulChoice::Defer;
  BackhaulReason reason = BackhaulReason::AllDronesLow;
  std::optional<std::size_t> bs;    // set for DroneBackhaul
  std::optional<std::size_t> slot;
  std::optional<Wh> residual;        // best candidate's post-duty energy

  bool operator==(const BackhaulDecision&) const = default;
};

struct BackhaulRequest {
  Wh backhaul_cost = 5.0;
  Wh reserve_margin = 2.0;
  bool terrestrial_available = false;
  // Stations whose drones may relay; every other BS when empty.
  std::vector<std::size_t> neighbors;
};

/// Picks the docked drone with the most energy left after flying to the
/// requesting cell and carrying the backhaul duty. It is used only when that
/// residual stays at or above d0 + reserve_margin; otherwise traffic goes
/// terrestrial if possible, else the request is deferred.
inline BackhaulDecision select_backhaul(std::size_t requesting_bs, const NetworkState& state, const Topology& topo,
                                        const DroneSpec& spec, const BackhaulRequest& req = {}) {
  std::vector<std::size_t> candidates = req.neighbors;
  if (candidates.empty())
    for (std::size_t i = 0; i < state.n(); ++i)
      if (i != requesting_bs) candidates.push_back(i);

  BackhaulDecision d;
  for (auto bs : candidates) {
    if (bs == requesting_bs || bs >= state.n()) continue;
    for (std::size_t j = 0; j < state.m(); ++j) {
      const auto& e = state.drones.at(bs, j);
      if (!e) continue;
      const Wh residual = *e - transit_energy(bs, requesting_bs, topo, spec) - req.backhaul_cost;
      const bool better = !d.residual || residual > *d.residual ||
                          (residual == *d.residual && std::pair(bs, j) < std::pair(*d.bs, *d.slot));
      if (better) {
        d.residual = residual;
        d.bs = bs;
        d.slot = j;
      }
    }
  }

  if (d.residual && *d.residual >= spec.d0 + req.reserve_margin) {
    d.choice = BackhaulChoice::DroneBackhaul;
    d.reason = BackhaulReason::SufficientReserve;
    return d;
  }
  d.reason = d.residual ? BackhaulReason::DepletionRisk : BackhaulReason::AllDronesLow;
  d.choice = req.terrestrial_available ? BackhaulChoice::TerrestrialRoute : BackhaulChoice::Defer;
  d.bs.reset();
  d.slot.reset();
  return d;
}

}  // namespace dronegrid
