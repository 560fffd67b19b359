#pragma once

#include <algorithm>
#include <optional>

#include "dronegrid/model.hpp"
#include "dronegrid/traces.hpp"

namespace dronegrid {

struct ChargeOutcome {
  NetworkState state;
  Wh solar_absorbed = 0.0;   // solar stored in batteries or drones
  Wh solar_curtailed = 0.0;  // solar lost to a full battery
  Wh grid_import = 0.0;      // external energy put into drones
  Wh battery_to_drones = 0.0;
};

namespace detail {

// Tops up docked drones of one BS in slot order from `budget`; returns the
// amount used.
inline Wh charge_row(DroneMatrix& drones, std::size_t bs, Wh budget, Wh capacity) {
  Wh used = 0.0;
  for (auto& slot : drones.row(bs)) {
    if (!slot || budget - used <= 0.0) continue;
    const Wh add = std::min(capacity - *slot, budget - used);
    if (add <= 0.0) continue;
    *slot += add;
    used += add;
  }
  return used;
}

inline Wh room_in_row(const DroneMatrix& drones, std::size_t bs, Wh capacity) {
  Wh room = 0.0;
  for (const auto& slot : drones.row(bs))
    if (slot) room += std::max(0.0, capacity - *slot);
  return room;
}

}  // namespace detail

/// One hour of energy intake: each BS battery takes the hour's solar
/// harvest, then drones charge per policy.
///   NocturnalFull - in night hours every docked drone fills to capacity
///                   from the external feed.
///   SolarWeighted - only in cheap_window hours; solar beyond the hour's load
///                   goes to drones first, the rest of their room comes from
///                   the external feed.
///   EnergyBuffer  - every hour drones draw from the BS battery, never
///                   taking it below buffer_floor.
inline ChargeOutcome apply_charging(const NetworkState& state, const TraceBundle& bundle, const ChargingPolicy& policy,
                                    const DroneSpec& spec, std::size_t hour,
                                    std::optional<Wh> battery_capacity = std::nullopt) {
  if (hour >= bundle.horizon()) throw ShapeError("charging hour beyond trace horizon");
  ChargeOutcome out{state};
  auto& s = out.state;
  const std::size_t hod = hour % kHoursPerDay;

  for (std::size_t i = 0; i < s.n(); ++i) {
    Wh solar = bundle.solar_at(i, hour);

    if (policy.id == ChargingPolicyId::SolarWeighted && policy.cheap_window.contains(hod)) {
      const Wh surplus = std::max(0.0, solar - bundle.load_at(i, hour));
      const Wh from_solar = detail::charge_row(s.drones, i, surplus, spec.capacity);
      solar -= from_solar;
      out.solar_absorbed += from_solar;
      out.grid_import += detail::charge_row(s.drones, i, detail::room_in_row(s.drones, i, spec.capacity), spec.capacity);
    }

    Wh stored = solar;
    if (battery_capacity) stored = std::clamp(*battery_capacity - s.bs_energy[i], 0.0, solar);
    s.bs_energy[i] += stored;
    out.solar_absorbed += stored;
    out.solar_curtailed += solar - stored;

    if (policy.id == ChargingPolicyId::NocturnalFull && policy.night_hours.contains(hod)) {
      out.grid_import += detail::charge_row(s.drones, i, detail::room_in_row(s.drones, i, spec.capacity), spec.capacity);
    } else if (policy.id == ChargingPolicyId::EnergyBuffer) {
      const Wh spare = s.bs_energy[i] - policy.buffer_floor;
      if (spare > 0.0) {
        const Wh used = detail::charge_row(s.drones, i, spare, spec.capacity);
        s.bs_energy[i] = used == spare ? policy.buffer_floor : s.bs_energy[i] - used;
        out.battery_to_drones += used;
      }
    }
  }
  return out;
}

}  // namespace dronegrid
