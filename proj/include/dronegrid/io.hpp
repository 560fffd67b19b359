#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dronegrid/detail/text.hpp"
#include "dronegrid/model.hpp"
#include "dronegrid/simulator.hpp"

namespace dronegrid {

using json = nlohmann::json;

// NetworkState <-> JSON. Empty drone slots are null.

inline json state_to_json(const NetworkState& s) {
  json drones = json::array();
  for (std::size_t i = 0; i < s.drones.rows(); ++i) {
    json row = json::array();
    for (const auto& slot : s.drones.row(i)) row.push_back(slot ? json(*slot) : json(nullptr));
    drones.push_back(std::move(row));
  }
  return json{{"hour", s.hour},
              {"bs_energy", s.bs_energy},
              {"bs_load", s.bs_load},
              {"bs_power", s.bs_power},
              {"m", s.drones.cols()},
              {"drone_energy", std::move(drones)}};
}

inline NetworkState state_from_json(const json& j) {
  NetworkState s;
  try {
    s.hour = j.at("hour").get<std::size_t>();
    s.bs_energy = j.at("bs_energy").get<std::vector<double>>();
    s.bs_load = j.at("bs_load").get<std::vector<double>>();
    s.bs_power = j.at("bs_power").get<std::vector<double>>();
    const auto& rows = j.at("drone_energy");
    const auto m = j.at("m").get<std::size_t>();
    s.drones = DroneMatrix(rows.size(), m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m) throw ShapeError("drone row " + std::to_string(i) + " has wrong width");
      for (std::size_t k = 0; k < m; ++k)
        if (!rows[i][k].is_null()) s.drones.at(i, k) = rows[i][k].get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(std::string("bad state json: ") + e.what());
  }
  return s;
}

// MetricsReport <-> JSON. Runtime is left out unless asked for, so that two
// identical runs produce identical files.

inline json report_to_json(const MetricsReport& r, bool include_runtime = false) {
  json j{{"case", std::string(to_string(r.case_id))},
         {"n", r.n},
         {"hours", r.hours},
         {"weekly_outages", r.weekly_outages},
         {"weekly_exchanges", r.weekly_exchanges},
         {"weekly_deficit_hours", r.weekly_deficit_hours},
         {"total_outages", r.total_outages},
         {"total_exchanges", r.total_exchanges},
         {"total_energy_transferred_wh", r.total_energy_transferred},
         {"total_grid_import_wh", r.total_grid_import},
         {"total_transit_loss_wh", r.total_transit_loss},
         {"total_load_wh", r.total_load},
         {"total_served_wh", r.total_served}};
  if (include_runtime) j["runtime_ms"] = r.runtime_ms;
  return j;
}

inline MetricsReport report_from_json(const json& j) {
  MetricsReport r;
  try {
    auto c = parse_case(j.at("case").get<std::string>());
    if (!c) throw Error("unknown case in report");
    r.case_id = *c;
    r.n = j.at("n").get<std::size_t>();
    r.hours = j.at("hours").get<std::size_t>();
    r.weekly_outages = j.at("weekly_outages").get<std::vector<std::vector<std::size_t>>>();
    r.weekly_exchanges = j.at("weekly_exchanges").get<std::vector<std::size_t>>();
    r.weekly_deficit_hours = j.at("weekly_deficit_hours").get<std::vector<std::size_t>>();
    r.total_outages = j.at("total_outages").get<std::size_t>();
    r.total_exchanges = j.at("total_exchanges").get<std::size_t>();
    r.total_energy_transferred = j.at("total_energy_transferred_wh").get<double>();
    r.total_grid_import = j.at("total_grid_import_wh").get<double>();
    r.total_transit_loss = j.at("total_transit_loss_wh").get<double>();
    r.total_load = j.at("total_load_wh").get<double>();
    r.total_served = j.at("total_served_wh").get<double>();
    if (j.contains("runtime_ms")) r.runtime_ms = j.at("runtime_ms").get<double>();
  } catch (const json::exception& e) {
    throw Error(std::string("bad report json: ") + e.what());
  }
  return r;
}

inline void write_weekly_outages(std::ostream& os, const MetricsReport& r) {
  os << "week,bs,outages\n";
  for (std::size_t w = 0; w < r.weekly_outages.size(); ++w)
    for (std::size_t i = 0; i < r.weekly_outages[w].size(); ++i)
      os << w << ',' << i << ',' << r.weekly_outages[w][i] << '\n';
}

inline void write_weekly_exchanges(std::ostream& os, const MetricsReport& r) {
  os << "week,exchanges\n";
  for (std::size_t w = 0; w < r.weekly_exchanges.size(); ++w) os << w << ',' << r.weekly_exchanges[w] << '\n';
}

namespace detail {

inline std::vector<std::vector<std::size_t>> read_count_csv(std::istream& is, std::string_view header,
                                                            std::size_t fields) {
  std::vector<std::vector<std::size_t>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto body = trim(line);
    if (lineno == 1) {
      if (body != header) throw Error("line 1: expected header '" + std::string(header) + "'");
      continue;
    }
    if (body.empty()) continue;
    const auto f = split(body, ',');
    if (f.size() != fields) throw Error("line " + std::to_string(lineno) + ": wrong field count");
    std::vector<std::size_t> row;
    for (auto v : f) {
      auto x = parse_int<std::size_t>(v);
      if (!x) throw Error("line " + std::to_string(lineno) + ": bad integer");
      row.push_back(*x);
    }
    rows.push_back(std::move(row));
  }
  if (lineno == 0) throw Error("empty csv");
  return rows;
}

}  // namespace detail

/// Reads `week,exchanges` back into a per-week vector.
inline std::vector<std::size_t> read_weekly_exchanges(std::istream& is) {
  std::vector<std::size_t> out;
  for (const auto& row : detail::read_count_csv(is, "week,exchanges", 2)) {
    if (row[0] != out.size()) throw Error("weeks out of order");
    out.push_back(row[1]);
  }
  return out;
}

/// Reads `week,bs,outages` back into a [week][bs] matrix.
inline std::vector<std::vector<std::size_t>> read_weekly_outages(std::istream& is) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& row : detail::read_count_csv(is, "week,bs,outages", 3)) {
    if (row[0] == out.size()) out.emplace_back();
    if (row[0] + 1 != out.size() || row[1] != out.back().size()) throw Error("rows out of order");
    out.back().push_back(row[2]);
  }
  return out;
}

}  // namespace dronegrid
