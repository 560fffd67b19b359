#pragma once

#include <algorithm>
#include <functional>

#include "dronegrid/model.hpp"

namespace dronegrid {

class SameNodeError : public Error {
 public:
  using Error::Error;
};

class AbsentDroneError : public Error {
 public:
  using Error::Error;
};

/// Drone residual-energy term used by traffic_loading: the drone's energy
/// status after a hop of the given length.
using ResidualFn = std::function<double(Km distance, Wh drone_energy, const DroneSpec& spec)>;

inline double default_residual(Km distance, Wh drone_energy, const DroneSpec& spec) {
  return std::max(0.0, drone_energy - spec.loss_per_km * distance);
}

/// Monetary transfer term C_ijh for a transfer cost and the hour's price.
using HourlyCostFn = std::function<double(Wh transfer_cost, double price)>;

inline double default_hourly_cost(Wh transfer_cost, double price) { return transfer_cost * price; }

struct ScoringModel {
  ResidualFn residual = default_residual;
  HourlyCostFn hourly_cost = default_hourly_cost;
};

struct TransferScore {
  double load_transfer = 0.0;
  double traffic_loading = 0.0;
  double decision_cost = 0.0;
};

namespace detail {

inline void check_pair(std::size_t i, std::size_t j, std::size_t n) {
  if (i >= n || j >= n) throw ShapeError("bs index out of range");
  if (i == j) throw SameNodeError("load transfer needs two distinct BSs, got " + std::to_string(i) + " twice");
}

}  // namespace detail

inline double load_transfer(std::size_t i, std::size_t j, const NetworkState& state, const Topology& topo,
                            const Weights& w) {
  detail::check_pair(i, j, std::min(state.n(), topo.n()));
  return w.alpha * state.bs_energy[i] + (1.0 - w.alpha) * topo.distance(i, j) + w.zeta * state.bs_power[i];
}

/// Drone `slot` must be docked at BS j; its energy feeds the residual term.
inline double traffic_loading(std::size_t i, std::size_t j, std::size_t hour, std::size_t slot,
                              const NetworkState& state, const Topology& topo, const Weights& w,
                              const DroneSpec& spec, const ScoringModel& model = {}) {
  const double l = load_transfer(i, j, state, topo, w);
  if (slot >= state.drones.cols()) throw ShapeError("drone slot out of range");
  const auto& drone = state.drones.at(j, slot);
  if (!drone) {
    throw AbsentDroneError("no drone in slot " + std::to_string(slot) + " of bs " + std::to_string(j));
  }
  const double price = w.price_by_hour[hour % kHoursPerDay];
  const double c = model.hourly_cost(topo.transfer_cost(i, j), price);
  const double f = model.residual(topo.distance(i, j), *drone, spec);
  return w.beta * l + (1.0 - w.beta) * c - w.delta * f;
}

inline double decision_cost(std::size_t i, std::size_t j, std::size_t hour, std::size_t slot,
                            const NetworkState& state, const Topology& topo, const Weights& w,
                            const DroneSpec& spec, const ScoringModel& model = {}) {
  const double t = traffic_loading(i, j, hour, slot, state, topo, w, spec, model);
  return w.gamma * t + (1.0 - w.gamma) * w.price_by_hour[hour % kHoursPerDay] + w.epsilon * topo.success_prob(i, j);
}

inline TransferScore score_transfer(std::size_t i, std::size_t j, std::size_t hour, std::size_t slot,
                                    const NetworkState& state, const Topology& topo, const Weights& w,
                                    const DroneSpec& spec, const ScoringModel& model = {}) {
  TransferScore s;
  s.load_transfer = load_transfer(i, j, state, topo, w);
  s.traffic_loading = traffic_loading(i, j, hour, slot, state, topo, w, spec, model);
  s.decision_cost = w.gamma * s.traffic_loading + (1.0 - w.gamma) * w.price_by_hour[hour % kHoursPerDay] +
                    w.epsilon * topo.success_prob(i, j);
  return s;
}

/// Energy a drone spends flying from BS i to BS j. Moving within a BS is free.
inline Wh transit_energy(std::size_t i, std::size_t j, const Topology& topo, const DroneSpec& spec) {
  if (i == j) return 0.0;
  return spec.loss_per_km * topo.distance(i, j) + spec.loss_per_min * spec.hover_minutes;
}

}  // namespace dronegrid
