#pragma once

#include <chrono>
#include <functional>
#include <utility>
#include <vector>

#include "dronegrid/charging.hpp"
#include "dronegrid/model.hpp"
#include "dronegrid/planner.hpp"
#include "dronegrid/traces.hpp"

namespace dronegrid {

class EndOfHorizon : public Error {
 public:
  using Error::Error;
};

struct HourRecord {
  std::size_t hour = 0;
  std::vector<Wh> per_bs_net;  // battery + drones - load, before any exchange
  std::vector<std::size_t> outages;
  std::vector<ExchangeMove> moves;
  std::vector<Wh> served;      // per BS
  std::vector<Wh> from_drones;  // per BS, drone energy spent on load
  Wh energy_transferred = 0.0;
  Wh grid_import = 0.0;
  Wh solar_in = 0.0;
  Wh load_demanded = 0.0;
  Wh load_served = 0.0;
  Wh transit_loss = 0.0;
  bool deficit_detected = false;
  bool infeasible = false;
};

struct MetricsReport {
  CaseId case_id = CaseId::Baseline;
  std::size_t n = 0;
  std::size_t hours = 0;
  std::vector<std::vector<std::size_t>> weekly_outages;  // [week][bs]
  std::vector<std::size_t> weekly_exchanges;
  std::vector<std::size_t> weekly_deficit_hours;
  std::size_t total_outages = 0;
  std::size_t total_exchanges = 0;
  Wh total_energy_transferred = 0.0;
  Wh total_grid_import = 0.0;
  Wh total_transit_loss = 0.0;
  Wh total_load = 0.0;
  Wh total_served = 0.0;
  double runtime_ms = 0.0;

  std::size_t weeks() const { return weekly_exchanges.size(); }

  // Everything except runtime, which is not reproducible.
  bool same_metrics(const MetricsReport& o) const {
    return case_id == o.case_id && n == o.n && hours == o.hours && weekly_outages == o.weekly_outages &&
           weekly_exchanges == o.weekly_exchanges && weekly_deficit_hours == o.weekly_deficit_hours &&
           total_outages == o.total_outages && total_exchanges == o.total_exchanges &&
           total_energy_transferred == o.total_energy_transferred && total_grid_import == o.total_grid_import &&
           total_transit_loss == o.total_transit_loss && total_load == o.total_load && total_served == o.total_served;
  }
};

/// Hour-0 state for a case: batteries at the configured initial level and,
/// except in Baseline, every slot holding a fully charged drone.
inline NetworkState initial_state(const SimulationConfig& config) {
  const bool drones = config.case_id != CaseId::Baseline;
  return make_state(config.n, config.m, config.initial_battery,
                    drones ? std::optional<Wh>(config.drone_spec.capacity) : std::nullopt);
}

/// Advances one hour: solar intake and drone charging, case-dependent
/// support, then load service. A BS whose load is not fully served records
/// an outage; unmet load is dropped.
inline std::pair<NetworkState, HourRecord> step(const NetworkState& state, const TraceBundle& bundle,
                                                const SimulationConfig& config, const Topology& topo,
                                                const ScoringModel& model = {}) {
  const std::size_t h = state.hour;
  if (h >= bundle.horizon() || h >= config.horizon_hours) throw EndOfHorizon("no trace data for hour " + std::to_string(h));
  const std::size_t n = state.n();

  HourRecord rec;
  rec.hour = h;

  auto charged = apply_charging(state, bundle, config.charging_policy, config.drone_spec, h, config.battery_capacity);
  NetworkState s = std::move(charged.state);
  rec.solar_in = charged.solar_absorbed;
  rec.grid_import = charged.grid_import;

  for (std::size_t i = 0; i < n; ++i) {
    s.bs_load[i] = bundle.load_at(i, h);
    s.bs_power[i] = s.bs_load[i];  // Wh over one hour
    rec.load_demanded += s.bs_load[i];
  }
  rec.per_bs_net.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rec.per_bs_net[i] = s.net(i);
    if (rec.per_bs_net[i] < -kEnergyEpsilon) rec.deficit_detected = true;
  }

  if (config.case_id == CaseId::OptimalRedistribution) {
    auto plan = plan_exchanges(s, topo, config.drone_spec, config.weights, h, model);
    rec.infeasible = plan.infeasible;
    rec.moves = std::move(plan.moves);
    s = std::move(plan.post_state);
    for (const auto& mv : rec.moves) {
      rec.energy_transferred += mv.energy_delivered;
      rec.transit_loss += mv.total_loss();
      rec.grid_import += mv.return_loss;
    }
  }

  rec.served.assign(n, 0.0);
  rec.from_drones.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Wh need = s.bs_load[i];
    const Wh from_battery = std::min(s.bs_energy[i], need);
    s.bs_energy[i] -= from_battery;
    need -= from_battery;
    rec.served[i] += from_battery;

    if (config.case_id != CaseId::Baseline && need > 0.0) {
      detail::sort_row(s.drones, i);
      for (auto& slot : s.drones.row(i)) {
        if (!slot || need <= 0.0) continue;
        const Wh take = std::min(*slot, need);
        *slot -= take;
        need -= take;
        rec.from_drones[i] += take;
      }
      rec.served[i] += rec.from_drones[i];
    }
    rec.load_served += rec.served[i];
    if (need > kEnergyEpsilon) rec.outages.push_back(i);
  }

  s.hour = h + 1;
  return {std::move(s), std::move(rec)};
}

using HourObserver = std::function<void(const NetworkState& before, const NetworkState& after, const HourRecord&)>;

inline MetricsReport run_case(const SimulationConfig& config, const TraceBundle& bundle, const Topology& topo,
                              const HourObserver& observer = {}, const ScoringModel& model = {}) {
  config.require_valid();
  if (bundle.n() != config.n || bundle.load.size() != config.n)
    throw ShapeError("trace bundle has " + std::to_string(bundle.n()) + " BSs, config has " + std::to_string(config.n));
  if (bundle.horizon() < config.horizon_hours) throw ShapeError("trace bundle shorter than horizon");
  if (topo.n() != config.n) throw ShapeError("topology size does not match n");

  const auto started = std::chrono::steady_clock::now();
  MetricsReport r;
  r.case_id = config.case_id;
  r.n = config.n;
  r.hours = config.horizon_hours;
  const std::size_t weeks = (config.horizon_hours + kHoursPerWeek - 1) / kHoursPerWeek;
  r.weekly_outages.assign(weeks, std::vector<std::size_t>(config.n, 0));
  r.weekly_exchanges.assign(weeks, 0);
  r.weekly_deficit_hours.assign(weeks, 0);

  NetworkState s = initial_state(config);
  for (std::size_t h = 0; h < config.horizon_hours; ++h) {
    auto [next, rec] = step(s, bundle, config, topo, model);
    const std::size_t w = h / kHoursPerWeek;
    for (auto bs : rec.outages) ++r.weekly_outages[w][bs];
    r.total_outages += rec.outages.size();
    r.weekly_exchanges[w] += rec.moves.size();
    r.total_exchanges += rec.moves.size();
    r.weekly_deficit_hours[w] += rec.deficit_detected;
    r.total_energy_transferred += rec.energy_transferred;
    r.total_grid_import += rec.grid_import;
    r.total_transit_loss += rec.transit_loss;
    r.total_load += rec.load_demanded;
    r.total_served += rec.load_served;
    if (observer) observer(s, next, rec);
    s = std::move(next);
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return r;
}

/// Percentage drop in total outages relative to a reference run.
inline double outage_reduction_pct(const MetricsReport& run, const MetricsReport& reference) {
  if (reference.total_outages == 0) return 0.0;
  return 100.0 * (1.0 - static_cast<double>(run.total_outages) / static_cast<double>(reference.total_outages));
}

}  // namespace dronegrid
