#pragma once

#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dronegrid/detail/text.hpp"
#include "dronegrid/io.hpp"
#include "dronegrid/model.hpp"
#include "dronegrid/planner.hpp"
#include "dronegrid/simulator.hpp"
#include "dronegrid/traces.hpp"

namespace dronegrid {

struct TopologySpec {
  Km spacing_km = kMinInterBsDistance;
  std::vector<Point> positions;  // overrides the grid when non-empty
  std::optional<Km> success_decay_km;

  Topology build(std::size_t n, const DroneSpec& spec) const {
    if (positions.empty()) return Topology::grid(n, spec, spacing_km, success_decay_km);
    if (positions.size() != n) throw ConfigError("topology.positions has " + std::to_string(positions.size()) +
                                                 " points, expected " + std::to_string(n));
    return Topology::from_positions(positions, spec, success_decay_km);
  }
};

/// Everything one invocation needs. Traces come from `trace_file` when set,
/// otherwise from `synth` seeded by config.rng_seed.
struct RunManifest {
  SimulationConfig config;
  std::optional<std::filesystem::path> trace_file;
  SynthProfile synth;
  IngestOptions ingest;
  TopologySpec topology;
  std::filesystem::path output_dir = "out";
  std::vector<CaseId> cases{kAllCases.begin(), kAllCases.end()};
};

inline std::vector<std::string> validate_manifest(const RunManifest& m) {
  auto out = m.config.violations();
  if (m.cases.empty()) out.push_back("no cases requested");
  if (m.ingest.smoothing_window == 0 || m.ingest.smoothing_window % 2 == 0)
    out.push_back("smoothing_window must be odd");
  if (!(m.topology.spacing_km > 0.0)) out.push_back("topology.spacing_km must be positive");
  if (!m.topology.positions.empty() && m.topology.positions.size() != m.config.n)
    out.push_back("topology.positions count does not match n");
  if (m.synth.sunrise_hour >= m.synth.sunset_hour || m.synth.sunset_hour > kHoursPerDay)
    out.push_back("synth sunrise/sunset out of order");
  if (m.output_dir.empty()) out.push_back("output_dir is empty");
  return out;
}

namespace detail {

inline std::set<std::size_t> parse_hour_set(std::string_view v) {
  std::set<std::size_t> out;
  for (auto part : split(v, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto dash = part.find('-');
    auto lo = parse_int<std::size_t>(trim(part.substr(0, dash)));
    auto hi = dash == std::string_view::npos ? lo : parse_int<std::size_t>(trim(part.substr(dash + 1)));
    if (!lo || !hi || *lo > *hi) throw ConfigError("bad hour range '" + std::string(part) + "'");
    for (auto h = *lo; h <= *hi; ++h) out.insert(h);
  }
  return out;
}

inline std::vector<Point> parse_points(std::string_view v) {
  std::vector<Point> out;
  for (auto part : split(v, ';')) {
    part = trim(part);
    if (part.empty()) continue;
    auto xy = split(part, ':');
    auto x = xy.size() == 2 ? parse_double(trim(xy[0])) : std::nullopt;
    auto y = xy.size() == 2 ? parse_double(trim(xy[1])) : std::nullopt;
    if (!x || !y) throw ConfigError("bad point '" + std::string(part) + "', expected x:y");
    out.push_back({*x, *y});
  }
  return out;
}

}  // namespace detail

/// Applies one `key = value` setting. Throws ConfigError on unknown keys or
/// malformed values.
inline void apply_setting(RunManifest& m, std::string_view key, std::string_view value) {
  using namespace detail;
  const std::string k(key);
  auto num = [&]() {
    auto v = parse_double(value);
    if (!v) throw ConfigError(k + ": expected a number, got '" + std::string(value) + "'");
    return *v;
  };
  auto count = [&]() {
    auto v = parse_int<std::size_t>(value);
    if (!v) throw ConfigError(k + ": expected a non-negative integer, got '" + std::string(value) + "'");
    return *v;
  };

  auto& c = m.config;
  auto& p = m.synth;
  const std::map<std::string, std::function<void()>> setters = {
      {"n", [&] { c.n = count(); }},
      {"m", [&] { c.m = count(); }},
      {"alpha", [&] { c.weights.alpha = num(); }},
      {"beta", [&] { c.weights.beta = num(); }},
      {"gamma", [&] { c.weights.gamma = num(); }},
      {"zeta", [&] { c.weights.zeta = num(); }},
      {"delta", [&] { c.weights.delta = num(); }},
      {"epsilon", [&] { c.weights.epsilon = num(); }},
      {"price",
       [&] {
         auto parts = split(value, ',');
         if (parts.size() == 1) {
           c.weights.price_by_hour = Weights::flat_price(num());
           return;
         }
         if (parts.size() != kHoursPerDay) throw ConfigError("price: expected 1 or 24 values");
         for (std::size_t h = 0; h < kHoursPerDay; ++h) {
           auto v = parse_double(trim(parts[h]));
           if (!v) throw ConfigError("price: bad value at hour " + std::to_string(h));
           c.weights.price_by_hour[h] = *v;
         }
       }},
      {"drone.capacity", [&] { c.drone_spec.capacity = num(); }},
      {"drone.speed_kmh", [&] { c.drone_spec.speed_kmh = num(); }},
      {"drone.loss_per_min", [&] { c.drone_spec.loss_per_min = num(); }},
      {"drone.loss_per_km", [&] { c.drone_spec.loss_per_km = num(); }},
      {"drone.d0", [&] { c.drone_spec.d0 = num(); }},
      {"drone.hover_minutes", [&] { c.drone_spec.hover_minutes = num(); }},
      {"horizon_hours", [&] { c.horizon_hours = count(); }},
      {"seed", [&] { c.rng_seed = count(); }},
      {"initial_battery", [&] { c.initial_battery = num(); }},
      {"battery_capacity",
       [&] {
         if (value == "none" || value.empty()) c.battery_capacity.reset();
         else c.battery_capacity = num();
       }},
      {"charging_policy",
       [&] {
         auto id = parse_charging_policy(value);
         if (!id) throw ConfigError("charging_policy: unknown policy '" + std::string(value) + "'");
         c.charging_policy.id = *id;
       }},
      {"night_hours", [&] { c.charging_policy.night_hours = parse_hour_set(value); }},
      {"cheap_window", [&] { c.charging_policy.cheap_window = parse_hour_set(value); }},
      {"buffer_floor", [&] { c.charging_policy.buffer_floor = num(); }},
      {"cases",
       [&] {
         m.cases.clear();
         for (auto part : split(value, ',')) {
           auto id = parse_case(trim(part));
           if (!id) throw ConfigError("cases: unknown case '" + std::string(trim(part)) + "'");
           m.cases.push_back(*id);
         }
       }},
      {"trace_file",
       [&] {
         if (value.empty() || value == "synthetic") m.trace_file.reset();
         else m.trace_file = std::filesystem::path(std::string(value));
       }},
      {"output_dir", [&] { m.output_dir = std::string(value); }},
      {"smoothing_window", [&] { m.ingest.smoothing_window = count(); }},
      {"topology.spacing_km", [&] { m.topology.spacing_km = num(); }},
      {"topology.positions", [&] { m.topology.positions = parse_points(value); }},
      {"topology.success_decay_km",
       [&] {
         if (value == "none" || value.empty()) m.topology.success_decay_km.reset();
         else m.topology.success_decay_km = num();
       }},
      {"synth.sunrise_hour", [&] { p.sunrise_hour = count(); }},
      {"synth.sunset_hour", [&] { p.sunset_hour = count(); }},
      {"synth.solar_peak", [&] { p.solar_peak = num(); }},
      {"synth.solar_to_load_ratio",
       [&] {
         if (value == "none") p.solar_to_load_ratio.reset();
         else p.solar_to_load_ratio = num();
       }},
      {"synth.seasonal_amplitude", [&] { p.seasonal_amplitude = num(); }},
      {"synth.seasonal_low_day", [&] { p.seasonal_low_day = count(); }},
      {"synth.cloud_sigma", [&] { p.cloud_sigma = num(); }},
      {"synth.solar_noise_sigma", [&] { p.solar_noise_sigma = num(); }},
      {"synth.load_base", [&] { p.load_base = num(); }},
      {"synth.morning_peak", [&] { p.morning_peak = num(); }},
      {"synth.evening_peak", [&] { p.evening_peak = num(); }},
      {"synth.morning_peak_hour", [&] { p.morning_peak_hour = num(); }},
      {"synth.evening_peak_hour", [&] { p.evening_peak_hour = num(); }},
      {"synth.peak_width_hours", [&] { p.peak_width_hours = num(); }},
      {"synth.load_noise_sigma", [&] { p.load_noise_sigma = num(); }},
      {"synth.bs_scale_spread", [&] { p.bs_scale_spread = num(); }},
      {"synth.surge_bs", [&] { p.surge_bs = count(); }},
      {"synth.surge_start_hour", [&] { p.surge_start_hour = count(); }},
      {"synth.surge_hours", [&] { p.surge_hours = count(); }},
      {"synth.surge_multiplier", [&] { p.surge_multiplier = num(); }},
      {"synth.surge_solar_factor", [&] { p.surge_solar_factor = num(); }},
  };
  auto it = setters.find(k);
  if (it == setters.end()) throw ConfigError("unknown key '" + k + "'");
  it->second();
}

/// Parses the `key = value` manifest format. Blank lines and lines starting
/// with '#' are ignored. A relative trace_file is resolved against `base_dir`.
inline RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {}) {
  RunManifest m;
  std::size_t lineno = 0;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(m, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (m.trace_file && m.trace_file->is_relative() && !base_dir.empty()) m.trace_file = base_dir / *m.trace_file;
  return m;
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_file(path), path.parent_path());
}

inline TraceBundle load_bundle(const RunManifest& m) {
  if (m.trace_file) return ingest_traces(*m.trace_file, m.config.n, m.config.horizon_hours, m.ingest);
  return synth_traces(m.config, m.synth);
}

struct CaseOutput {
  MetricsReport report;
  std::vector<ExchangeMove> moves;
};

struct RunSummary {
  std::vector<CaseOutput> cases;  // in request order
  std::string comparison_csv;
};

inline std::string comparison_table(const std::vector<CaseOutput>& cases) {
  const MetricsReport* base = nullptr;
  for (const auto& c : cases)
    if (c.report.case_id == CaseId::Baseline) base = &c.report;
  std::ostringstream os;
  os << "case,total_outages,reduction_vs_baseline_pct,total_exchanges,energy_transferred_wh\n";
  for (const auto& c : cases) {
    const auto& r = c.report;
    os << to_string(r.case_id) << ',' << r.total_outages << ',';
    if (base) os << detail::format_double(outage_reduction_pct(r, *base));
    os << ',' << r.total_exchanges << ',' << detail::format_double(r.total_energy_transferred) << '\n';
  }
  return os.str();
}

inline CaseOutput run_one(const RunManifest& m, CaseId id, const TraceBundle& bundle, const Topology& topo) {
  auto config = m.config;
  config.case_id = id;
  CaseOutput out;
  out.report = run_case(config, bundle, topo, [&](const NetworkState&, const NetworkState&, const HourRecord& rec) {
    out.moves.insert(out.moves.end(), rec.moves.begin(), rec.moves.end());
  });
  return out;
}

/// Writes the files for one case under output_dir/<case>/.
inline void write_case_files(const std::filesystem::path& dir, const CaseOutput& c) {
  std::filesystem::create_directories(dir);
  detail::write_file_atomic(dir / "report.json", report_to_json(c.report).dump(2) + "\n");
  std::ostringstream outages, exchanges, moves;
  write_weekly_outages(outages, c.report);
  write_weekly_exchanges(exchanges, c.report);
  write_moves(moves, c.moves);
  detail::write_file_atomic(dir / "weekly_outages.csv", outages.str());
  detail::write_file_atomic(dir / "weekly_exchanges.csv", exchanges.str());
  detail::write_file_atomic(dir / "moves.csv", moves.str());
}

/// Runs every requested case (concurrently) and writes per-case reports,
/// series files, comparison.csv and timing.csv. Timing is kept apart so the
/// other files are byte-identical across repeated runs.
inline RunSummary run_manifest(const RunManifest& m) {
  if (auto v = validate_manifest(m); !v.empty()) {
    std::string msg = "invalid manifest:";
    for (auto& s : v) msg += " " + s + ";";
    throw ConfigError(msg);
  }
  const auto bundle = load_bundle(m);
  const auto topo = m.topology.build(m.config.n, m.config.drone_spec);

  std::vector<std::future<CaseOutput>> jobs;
  for (auto id : m.cases)
    jobs.push_back(std::async(std::launch::async, [&, id] {
      auto out = run_one(m, id, bundle, topo);
      write_case_files(m.output_dir / std::string(to_string(id)), out);
      return out;
    }));

  RunSummary summary;
  std::exception_ptr first_error;
  for (auto& j : jobs) {
    try {
      summary.cases.push_back(j.get());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  summary.comparison_csv = comparison_table(summary.cases);
  detail::write_file_atomic(m.output_dir / "comparison.csv", summary.comparison_csv);
  std::ostringstream timing;
  timing << "case,runtime_ms\n";
  for (const auto& c : summary.cases)
    timing << to_string(c.report.case_id) << ',' << detail::format_double(c.report.runtime_ms) << '\n';
  detail::write_file_atomic(m.output_dir / "timing.csv", timing.str());
  return summary;
}

/// Synthesises traces for the manifest's n, horizon and seed and writes them
/// in the trace file format.
inline void gen_traces(const SimulationConfig& config, const SynthProfile& profile, const std::filesystem::path& out) {
  if (out.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(out.parent_path(), ec);
  }
  detail::write_file_atomic(out, traces_to_string(synth_traces(config, profile)));
}

/// Manifest checks plus, when a trace file is named, a lint of its contents.
inline std::vector<std::string> lint_manifest(const RunManifest& m) {
  auto out = validate_manifest(m);
  if (!out.empty()) return out;
  try {
    const auto bundle = load_bundle(m);
    for (auto& v : bundle_violations(bundle, m.config.horizon_hours)) out.push_back(v);
    (void)m.topology.build(m.config.n, m.config.drone_spec);
  } catch (const Error& e) {
    out.push_back(e.what());
  }
  return out;
}

}  // namespace dronegrid
