#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dronegrid {

using Wh = double;
using Km = double;

inline constexpr std::size_t kHoursPerDay = 24;
inline constexpr std::size_t kHoursPerWeek = 168;
inline constexpr std::size_t kHoursPerYear = 8760;

// Shortfalls smaller than this are treated as rounding noise.
inline constexpr Wh kEnergyEpsilon = 1e-9;

// Minimum spacing between two base stations.
inline constexpr Km kMinInterBsDistance = 2.0;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Weights {
  double alpha = 0.7;
  double beta = 0.5;
  double gamma = 0.3;
  double zeta = 0.8;
  double delta = 0.6;
  double epsilon = 0.4;
  std::array<double, kHoursPerDay> price_by_hour = flat_price(1.0);

  static constexpr std::array<double, kHoursPerDay> flat_price(double p) {
    std::array<double, kHoursPerDay> out{};
    out.fill(p);
    return out;
  }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    auto unit = [&](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) out.push_back(std::string(name) + " outside [0,1]");
    };
    auto nonneg = [&](double v, const char* name) {
      if (!(v >= 0.0)) out.push_back(std::string(name) + " negative");
    };
    unit(alpha, "alpha");
    unit(beta, "beta");
    unit(gamma, "gamma");
    nonneg(zeta, "zeta");
    nonneg(delta, "delta");
    nonneg(epsilon, "epsilon");
    for (std::size_t h = 0; h < price_by_hour.size(); ++h) {
      if (!(price_by_hour[h] >= 0.0)) out.push_back("price at hour " + std::to_string(h) + " negative");
    }
    return out;
  }

  bool operator==(const Weights&) const = default;
};

/// Drone battery and flight-loss parameters. Energies are Wh; the per-minute
/// loss applies only to hover/service time, transit is charged per km.
struct DroneSpec {
  Wh capacity = 30.0;
  double speed_kmh = 60.0;
  Wh loss_per_min = 0.5;
  Wh loss_per_km = 0.5;
  Wh d0 = 1.0;
  double hover_minutes = 0.0;

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!(d0 > 0.0)) out.push_back("d0 must be positive");
    if (!(capacity > d0)) out.push_back("capacity must exceed d0");
    if (!(speed_kmh > 0.0)) out.push_back("speed must be positive");
    if (!(loss_per_km >= 0.0) || !(loss_per_min >= 0.0)) out.push_back("loss rates must be non-negative");
    if (!(hover_minutes >= 0.0)) out.push_back("hover time must be non-negative");
    return out;
  }

  bool operator==(const DroneSpec&) const = default;
};

/// Fixed n x m grid of drone docking slots. A slot is either empty
/// (std::nullopt) or holds a drone with the given stored energy.
class DroneMatrix {
 public:
  using Slot = std::optional<Wh>;

  DroneMatrix() = default;
  DroneMatrix(std::size_t rows, std::size_t cols, Slot fill = std::nullopt)
      : rows_(rows), cols_(cols), slots_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Slot& at(std::size_t bs, std::size_t slot) { return slots_.at(bs * cols_ + slot); }
  const Slot& at(std::size_t bs, std::size_t slot) const { return slots_.at(bs * cols_ + slot); }

  std::span<Slot> row(std::size_t bs) { return {slots_.data() + bs * cols_, cols_}; }
  std::span<const Slot> row(std::size_t bs) const { return {slots_.data() + bs * cols_, cols_}; }

  Wh row_total(std::size_t bs) const {
    Wh sum = 0.0;
    for (const auto& s : row(bs)) sum += s.value_or(0.0);
    return sum;
  }

  Wh total() const {
    Wh sum = 0.0;
    for (const auto& s : slots_) sum += s.value_or(0.0);
    return sum;
  }

  std::size_t occupied(std::size_t bs) const {
    std::size_t c = 0;
    for (const auto& s : row(bs)) c += s.has_value();
    return c;
  }

  bool operator==(const DroneMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Slot> slots_;
};

struct NetworkState {
  std::size_t hour = 0;
  std::vector<Wh> bs_energy;
  std::vector<Wh> bs_load;
  DroneMatrix drones;
  std::vector<double> bs_power;  // W; hour's load as average power

  std::size_t n() const { return bs_energy.size(); }
  std::size_t m() const { return drones.cols(); }

  /// Battery plus docked drone energy minus this hour's load.
  Wh net(std::size_t bs) const { return bs_energy[bs] + drones.row_total(bs) - bs_load[bs]; }

  Wh total_stored() const {
    Wh sum = drones.total();
    for (Wh e : bs_energy) sum += e;
    return sum;
  }

  bool operator==(const NetworkState&) const = default;
};

/// Square row-major matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_.at(i * n_ + j); }
  double operator()(std::size_t i, std::size_t j) const { return data_.at(i * n_ + j); }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct Point {
  Km x = 0.0;
  Km y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Topology {
  std::vector<Point> positions;
  SquareMatrix distance;       // km
  SquareMatrix transfer_cost;  // Wh
  SquareMatrix success_prob;

  std::size_t n() const { return distance.size(); }

  /// Distances from planar positions; transfer cost is the per-km flight
  /// loss; success probability is 1 unless a decay length is given, in
  /// which case it is exp(-distance / decay_km).
  static Topology from_positions(std::vector<Point> pts, const DroneSpec& spec,
                                 std::optional<Km> success_decay_km = std::nullopt) {
    Topology t;
    const std::size_t n = pts.size();
    t.positions = std::move(pts);
    t.distance = SquareMatrix(n);
    t.transfer_cost = SquareMatrix(n);
    t.success_prob = SquareMatrix(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const Km d = std::hypot(t.positions[i].x - t.positions[j].x, t.positions[i].y - t.positions[j].y);
        t.distance(i, j) = d;
        t.transfer_cost(i, j) = spec.loss_per_km * d;
        if (success_decay_km) t.success_prob(i, j) = std::exp(-d / *success_decay_km);
      }
    }
    return t;
  }

  /// n stations on a square grid with the given spacing.
  static Topology grid(std::size_t n, const DroneSpec& spec, Km spacing = kMinInterBsDistance,
                       std::optional<Km> success_decay_km = std::nullopt) {
    std::size_t cols = 1;
    while (cols * cols < n) ++cols;
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back({static_cast<double>(i % cols) * spacing, static_cast<double>(i / cols) * spacing});
    }
    return from_positions(std::move(pts), spec, success_decay_km);
  }

  bool operator==(const Topology&) const = default;
};

enum class CaseId { Baseline, StaticDroneSupport, OptimalRedistribution };

inline constexpr std::array<CaseId, 3> kAllCases = {CaseId::Baseline, CaseId::StaticDroneSupport,
                                                    CaseId::OptimalRedistribution};

inline std::string_view to_string(CaseId c) {
  switch (c) {
    case CaseId::Baseline: return "baseline";
    case CaseId::StaticDroneSupport: return "static";
    case CaseId::OptimalRedistribution: return "optimal";
  }
  return "unknown";
}

inline std::optional<CaseId> parse_case(std::string_view s) {
  if (s == "baseline" || s == "case1" || s == "1") return CaseId::Baseline;
  if (s == "static" || s == "case2" || s == "2") return CaseId::StaticDroneSupport;
  if (s == "optimal" || s == "case3" || s == "3") return CaseId::OptimalRedistribution;
  return std::nullopt;
}

enum class ChargingPolicyId { NocturnalFull, SolarWeighted, EnergyBuffer };

inline std::string_view to_string(ChargingPolicyId p) {
  switch (p) {
    case ChargingPolicyId::NocturnalFull: return "nocturnal";
    case ChargingPolicyId::SolarWeighted: return "solar-weighted";
    case ChargingPolicyId::EnergyBuffer: return "energy-buffer";
  }
  return "unknown";
}

inline std::optional<ChargingPolicyId> parse_charging_policy(std::string_view s) {
  if (s == "nocturnal" || s == "NocturnalFull") return ChargingPolicyId::NocturnalFull;
  if (s == "solar-weighted" || s == "swca" || s == "SolarWeighted") return ChargingPolicyId::SolarWeighted;
  if (s == "energy-buffer" || s == "eba" || s == "EnergyBuffer") return ChargingPolicyId::EnergyBuffer;
  return std::nullopt;
}

inline std::set<std::size_t> default_night_hours() { return {0, 1, 2, 3, 4, 5, 20, 21, 22, 23}; }

struct ChargingPolicy {
  ChargingPolicyId id = ChargingPolicyId::NocturnalFull;
  std::set<std::size_t> night_hours = default_night_hours();  // NocturnalFull
  std::set<std::size_t> cheap_window = default_night_hours();  // SolarWeighted
  Wh buffer_floor = 0.0;                                       // EnergyBuffer

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!(buffer_floor >= 0.0)) out.push_back("buffer_floor negative");
    for (auto h : cheap_window)
      if (h >= kHoursPerDay) out.push_back("cheap_window hour " + std::to_string(h) + " out of range");
    for (auto h : night_hours)
      if (h >= kHoursPerDay) out.push_back("night hour " + std::to_string(h) + " out of range");
    return out;
  }

  bool operator==(const ChargingPolicy&) const = default;
};

struct SimulationConfig {
  std::size_t n = 5;
  std::size_t m = 10;
  Weights weights;
  DroneSpec drone_spec;
  CaseId case_id = CaseId::OptimalRedistribution;
  std::size_t horizon_hours = kHoursPerYear;
  ChargingPolicy charging_policy;
  std::uint64_t rng_seed = 7;
  Wh initial_battery = 0.0;
  std::optional<Wh> battery_capacity;  // unbounded when empty

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (n < 1) out.push_back("n must be >= 1");
    if (m < 1) out.push_back("m must be >= 1");
    if (horizon_hours < 1) out.push_back("horizon_hours must be >= 1");
    if (!(initial_battery >= 0.0)) out.push_back("initial_battery negative");
    if (battery_capacity && !(*battery_capacity >= 0.0)) out.push_back("battery_capacity negative");
    for (auto& v : weights.violations()) out.push_back(v);
    for (auto& v : drone_spec.violations()) out.push_back(v);
    for (auto& v : charging_policy.violations()) out.push_back(v);
    return out;
  }

  void require_valid() const {
    auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid simulation config:";
    for (auto& s : v) msg += " " + s + ";";
    throw ConfigError(msg);
  }
};

struct ValidationResult {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every NetworkState/Topology invariant and reports each violation
/// with its indices. Never throws on mis-sized inputs.
inline ValidationResult validate_state(const NetworkState& state, const Topology& topo, const DroneSpec& spec) {
  ValidationResult r;
  auto add = [&](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    r.violations.push_back(os.str());
  };

  const std::size_t n = state.bs_energy.size();
  if (state.bs_load.size() != n) add("bs_load has ", state.bs_load.size(), " entries, expected ", n);
  if (state.bs_power.size() != n) add("bs_power has ", state.bs_power.size(), " entries, expected ", n);
  if (state.drones.rows() != n) add("drone matrix has ", state.drones.rows(), " rows, expected ", n);

  for (std::size_t i = 0; i < state.bs_energy.size(); ++i)
    if (!(state.bs_energy[i] >= 0.0)) add("negative energy at bs ", i);
  for (std::size_t i = 0; i < state.bs_load.size(); ++i)
    if (!(state.bs_load[i] >= 0.0)) add("negative load at bs ", i);
  for (std::size_t i = 0; i < state.bs_power.size(); ++i)
    if (!(state.bs_power[i] >= 0.0)) add("negative power at bs ", i);

  for (std::size_t i = 0; i < state.drones.rows(); ++i) {
    for (std::size_t j = 0; j < state.drones.cols(); ++j) {
      const auto& s = state.drones.at(i, j);
      if (!s) continue;
      if (!(*s >= 0.0)) add("negative drone energy at (", i, ",", j, ")");
      if (*s > spec.capacity) add("capacity exceeded at (", i, ",", j, ")");
    }
  }

  const std::size_t tn = topo.distance.size();
  if (tn != n) add("topology has ", tn, " nodes, state has ", n);
  if (topo.transfer_cost.size() != tn) add("transfer_cost is not ", tn, "x", tn);
  if (topo.success_prob.size() != tn) add("success_prob is not ", tn, "x", tn);

  for (std::size_t i = 0; i < tn; ++i) {
    for (std::size_t j = 0; j < tn; ++j) {
      const double d = topo.distance(i, j);
      if (i == j) {
        if (d != 0.0) add("nonzero distance diagonal at ", i);
        continue;
      }
      if (d != topo.distance(j, i)) add("distance not symmetric at (", i, ",", j, ")");
      if (i < j && !(d >= kMinInterBsDistance)) add("inter-BS distance below 2 km at (", i, ",", j, ")");
    }
  }
  if (topo.transfer_cost.size() == tn) {
    for (std::size_t i = 0; i < tn; ++i)
      for (std::size_t j = 0; j < tn; ++j) {
        const double c = topo.transfer_cost(i, j);
        if (i == j && c != 0.0) add("nonzero transfer cost diagonal at ", i);
        if (i != j && !(c > 0.0)) add("non-positive transfer cost at (", i, ",", j, ")");
      }
  }
  if (topo.success_prob.size() == tn) {
    for (std::size_t i = 0; i < tn; ++i)
      for (std::size_t j = 0; j < tn; ++j) {
        const double p = topo.success_prob(i, j);
        if (i == j && p != 1.0) add("success probability diagonal != 1 at ", i);
        if (!(p >= 0.0 && p <= 1.0)) add("success probability outside [0,1] at (", i, ",", j, ")");
      }
  }
  return r;
}

/// Fresh state at hour 0: every BS battery at `battery`, zero load, every
/// slot holding a drone at `drone_energy` (or empty when not given).
inline NetworkState make_state(std::size_t n, std::size_t m, Wh battery, std::optional<Wh> drone_energy) {
  NetworkState s;
  s.bs_energy.assign(n, battery);
  s.bs_load.assign(n, 0.0);
  s.bs_power.assign(n, 0.0);
  s.drones = DroneMatrix(n, m, drone_energy);
  return s;
}

}  // namespace dronegrid
