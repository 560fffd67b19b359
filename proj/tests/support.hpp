#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "dronegrid/model.hpp"
#include "dronegrid/traces.hpp"

namespace dgtest {

using namespace dronegrid;

// Random state with energies drawn uniformly (or as integers) from [0, hi].
// Each drone slot is empty with probability p_empty.
inline NetworkState random_state(std::mt19937_64& rng, std::size_t n, std::size_t m, double hi, bool integer,
                                 double p_empty = 0.2, double drone_cap = 30.0) {
  std::uniform_real_distribution<double> real(0.0, hi);
  std::uniform_int_distribution<int> whole(0, static_cast<int>(hi));
  std::bernoulli_distribution empty(p_empty);
  auto draw = [&](double cap) {
    const double v = integer ? static_cast<double>(whole(rng)) : real(rng);
    return std::min(v, cap);
  };
  NetworkState s = make_state(n, m, 0.0, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    s.bs_energy[i] = draw(1e9);
    s.bs_load[i] = draw(1e9);
    s.bs_power[i] = s.bs_load[i];
    for (std::size_t j = 0; j < m; ++j)
      if (!empty(rng)) s.drones.at(i, j) = draw(drone_cap);
  }
  return s;
}

// Two stations 2 km apart: BS0 net -3 with empty slots, BS1 net +10 whose
// strongest drone holds 6 Wh.
inline NetworkState two_bs_example() {
  NetworkState s = make_state(2, 2, 0.0, std::nullopt);
  s.bs_load = {3.0, 0.0};
  s.bs_power = s.bs_load;
  s.bs_energy = {0.0, 4.0};
  s.drones.at(1, 1) = 6.0;
  return s;
}

// Constant-valued bundle for hand-checked simulator steps.
inline TraceBundle flat_bundle(std::size_t n, std::size_t hours, Wh solar, Wh load) {
  TraceBundle b;
  for (std::size_t i = 0; i < n; ++i) {
    b.solar.push_back({i, TraceKind::SolarHarvest, std::vector<Wh>(hours, solar)});
    b.load.push_back({i, TraceKind::Load, std::vector<Wh>(hours, load)});
  }
  return b;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dronegrid_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dgtest
