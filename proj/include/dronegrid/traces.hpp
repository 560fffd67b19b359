#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dronegrid/detail/text.hpp"
#include "dronegrid/model.hpp"

namespace dronegrid {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

enum class TraceKind { SolarHarvest, Load };

struct HourlyTrace {
  std::size_t bs_id = 0;
  TraceKind kind = TraceKind::Load;
  std::vector<Wh> values;

  bool operator==(const HourlyTrace&) const = default;
};

struct TraceBundle {
  std::vector<HourlyTrace> solar;
  std::vector<HourlyTrace> load;

  std::size_t n() const { return solar.size(); }
  std::size_t horizon() const { return solar.empty() ? 0 : solar.front().values.size(); }

  Wh solar_at(std::size_t bs, std::size_t hour) const { return solar[bs].values[hour]; }
  Wh load_at(std::size_t bs, std::size_t hour) const { return load[bs].values[hour]; }

  bool operator==(const TraceBundle&) const = default;
};

/// Hour-of-day is "night" for solar purposes when it is at or before sunrise
/// or at or after sunset.
inline bool is_solar_night(std::size_t hour_of_day, std::size_t sunrise, std::size_t sunset) {
  return hour_of_day <= sunrise || hour_of_day >= sunset;
}

inline std::vector<std::string> bundle_violations(const TraceBundle& b, std::size_t horizon,
                                                  std::optional<std::pair<std::size_t, std::size_t>> daylight = {}) {
  std::vector<std::string> out;
  if (b.solar.size() != b.load.size()) out.push_back("solar and load trace counts differ");
  auto check = [&](const HourlyTrace& t, std::size_t idx, TraceKind kind) {
    const std::string tag = std::string(kind == TraceKind::SolarHarvest ? "solar" : "load") + " trace " +
                            std::to_string(idx);
    if (t.bs_id != idx) out.push_back(tag + " has bs_id " + std::to_string(t.bs_id));
    if (t.kind != kind) out.push_back(tag + " has the wrong kind");
    if (t.values.size() != horizon) out.push_back(tag + " has " + std::to_string(t.values.size()) + " hours");
    for (std::size_t h = 0; h < t.values.size(); ++h) {
      if (!(t.values[h] >= 0.0)) {
        out.push_back(tag + " negative at hour " + std::to_string(h));
        break;
      }
      if (kind == TraceKind::SolarHarvest && daylight &&
          is_solar_night(h % kHoursPerDay, daylight->first, daylight->second) && t.values[h] != 0.0) {
        out.push_back(tag + " nonzero at night hour " + std::to_string(h));
        break;
      }
    }
  };
  for (std::size_t i = 0; i < b.solar.size(); ++i) check(b.solar[i], i, TraceKind::SolarHarvest);
  for (std::size_t i = 0; i < b.load.size(); ++i) check(b.load[i], i, TraceKind::Load);
  return out;
}

/// Fills gaps by linear interpolation between the nearest present neighbours
/// (edge gaps copy the nearest value), then applies a centred moving average
/// of odd `window` with edge-value padding. Negative results clamp to 0.
inline std::vector<Wh> clean_trace(std::span<const std::optional<Wh>> raw, std::size_t window = 3) {
  if (window == 0 || window % 2 == 0) throw ConfigError("smoothing window must be odd and positive");
  std::vector<std::size_t> present;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw[i]) present.push_back(i);
  if (present.size() < 2) throw InsufficientDataError("need at least two present values to clean a trace");

  std::vector<Wh> filled(raw.size());
  std::size_t k = 0;  // index into present: present[k] is the next present at or after i
  for (std::size_t i = 0; i < raw.size(); ++i) {
    while (k < present.size() && present[k] < i) ++k;
    if (raw[i]) {
      filled[i] = *raw[i];
    } else if (k == 0) {
      filled[i] = *raw[present.front()];
    } else if (k == present.size()) {
      filled[i] = *raw[present.back()];
    } else {
      const std::size_t p = present[k - 1], q = present[k];
      const double t = static_cast<double>(i - p) / static_cast<double>(q - p);
      filled[i] = *raw[p] + (*raw[q] - *raw[p]) * t;
    }
  }

  if (window == 1) {
    for (auto& v : filled) v = std::max(0.0, v);
    return filled;
  }
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto last = static_cast<std::ptrdiff_t>(filled.size()) - 1;
  std::vector<Wh> out(filled.size());
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    Wh sum = 0.0;
    for (std::ptrdiff_t d = -half; d <= half; ++d) sum += filled[static_cast<std::size_t>(std::clamp(i + d, std::ptrdiff_t{0}, last))];
    out[static_cast<std::size_t>(i)] = std::max(0.0, sum / static_cast<double>(window));
  }
  return out;
}

inline std::vector<Wh> clean_trace(const std::vector<std::optional<Wh>>& raw, std::size_t window = 3) {
  return clean_trace(std::span<const std::optional<Wh>>(raw), window);
}

/// Trace file contents before cleaning: one column per BS and kind.
struct RawTraceTable {
  std::size_t n = 0;
  std::size_t rows = 0;
  std::vector<std::vector<std::optional<Wh>>> solar;  // [bs][hour]
  std::vector<std::vector<std::optional<Wh>>> load;

  bool operator==(const RawTraceTable&) const = default;
};

inline std::string trace_header(std::size_t n) {
  std::string h = "hour";
  for (std::size_t i = 1; i <= n; ++i) h += ",bs" + std::to_string(i) + "_solar";
  for (std::size_t i = 1; i <= n; ++i) h += ",bs" + std::to_string(i) + "_load";
  return h;
}

inline void write_trace_table(std::ostream& os, const RawTraceTable& t) {
  os << trace_header(t.n) << '\n';
  auto cell = [&](const std::optional<Wh>& v) {
    os << ',';
    if (v) os << detail::format_double(*v);
  };
  for (std::size_t h = 0; h < t.rows; ++h) {
    os << h;
    for (std::size_t i = 0; i < t.n; ++i) cell(t.solar[i][h]);
    for (std::size_t i = 0; i < t.n; ++i) cell(t.load[i][h]);
    os << '\n';
  }
}

inline RawTraceTable to_table(const TraceBundle& b) {
  RawTraceTable t;
  t.n = b.n();
  t.rows = b.horizon();
  auto col = [](const HourlyTrace& tr) { return std::vector<std::optional<Wh>>(tr.values.begin(), tr.values.end()); };
  for (const auto& s : b.solar) t.solar.push_back(col(s));
  for (const auto& l : b.load) t.load.push_back(col(l));
  return t;
}

inline void write_traces(std::ostream& os, const TraceBundle& b) { write_trace_table(os, to_table(b)); }

inline std::string traces_to_string(const TraceBundle& b) {
  std::ostringstream os;
  write_traces(os, b);
  return os.str();
}

inline void write_trace_file(const std::filesystem::path& path, const TraceBundle& b) {
  detail::write_file_atomic(path, traces_to_string(b));
}

inline RawTraceTable read_trace_table(std::istream& is) {
  RawTraceTable t;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw ParseError(1, "empty trace file");
  ++lineno;
  const auto header = detail::split(detail::trim(line), ',');
  if (header.size() < 3 || (header.size() - 1) % 2 != 0 || header[0] != "hour")
    throw ParseError(lineno, "header must be hour followed by solar and load columns");
  t.n = (header.size() - 1) / 2;
  if (detail::trim(line) != trace_header(t.n)) throw ParseError(lineno, "unexpected column names");
  t.solar.resize(t.n);
  t.load.resize(t.n);

  while (std::getline(is, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto f = detail::split(body, ',');
    if (f.size() != header.size())
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    const auto hour = detail::parse_int<std::size_t>(f[0]);
    if (!hour || *hour != t.rows) throw ParseError(lineno, "hour column must count up from 0");
    for (std::size_t c = 1; c < f.size(); ++c) {
      std::optional<Wh> v;
      if (!detail::trim(f[c]).empty()) {
        v = detail::parse_double(f[c]);
        if (!v || !std::isfinite(*v)) throw ParseError(lineno, "bad number '" + std::string(f[c]) + "'");
        if (*v < 0.0) throw ParseError(lineno, "negative energy '" + std::string(f[c]) + "'");
      }
      if (c <= t.n)
        t.solar[c - 1].push_back(v);
      else
        t.load[c - 1 - t.n].push_back(v);
    }
    ++t.rows;
  }
  return t;
}

inline RawTraceTable read_trace_file(const std::filesystem::path& path) {
  std::istringstream is(detail::read_file(path));
  return read_trace_table(is);
}

struct IngestOptions {
  std::size_t smoothing_window = 3;
};

/// Cleans every column and normalises it to `horizon_hours`: longer data is
/// truncated, shorter data is repeated from its start.
inline TraceBundle bundle_from_table(const RawTraceTable& t, std::size_t n, std::size_t horizon_hours,
                                     const IngestOptions& opts = {}) {
  if (t.n != n) throw ShapeError("trace file has " + std::to_string(t.n) + " BS columns, expected " + std::to_string(n));
  auto build = [&](const std::vector<std::optional<Wh>>& raw, std::size_t bs, TraceKind kind) {
    HourlyTrace tr{bs, kind, clean_trace(raw, opts.smoothing_window)};
    std::vector<Wh> norm(horizon_hours);
    for (std::size_t h = 0; h < horizon_hours; ++h) norm[h] = tr.values[h % tr.values.size()];
    tr.values = std::move(norm);
    return tr;
  };
  TraceBundle b;
  for (std::size_t i = 0; i < n; ++i) b.solar.push_back(build(t.solar[i], i, TraceKind::SolarHarvest));
  for (std::size_t i = 0; i < n; ++i) b.load.push_back(build(t.load[i], i, TraceKind::Load));
  return b;
}

inline TraceBundle ingest_traces(const std::filesystem::path& path, std::size_t n, std::size_t horizon_hours,
                                 const IngestOptions& opts = {}) {
  return bundle_from_table(read_trace_file(path), n, horizon_hours, opts);
}

/// Shape of the synthetic year. Solar is a truncated sinusoid between
/// sunrise and sunset with a seasonal dip and day/hour multiplicative noise;
/// load is a base level plus morning and evening Gaussian peaks.
struct SynthProfile {
  std::size_t sunrise_hour = 6;
  std::size_t sunset_hour = 18;
  Wh solar_peak = 60.0;
  // When set, each BS's solar is rescaled so its yearly total equals this
  // fraction of its yearly (pre-surge) load.
  std::optional<double> solar_to_load_ratio = 0.95;
  double seasonal_amplitude = 0.3;
  std::size_t seasonal_low_day = 200;
  double cloud_sigma = 0.3;
  double solar_noise_sigma = 0.1;

  Wh load_base = 12.0;
  Wh morning_peak = 5.0;
  Wh evening_peak = 8.0;
  double morning_peak_hour = 9.0;
  double evening_peak_hour = 20.0;
  double peak_width_hours = 2.5;
  double load_noise_sigma = 0.15;
  double bs_scale_spread = 0.3;

  // One BS goes through a stress period: demand scaled up and harvest
  // derated (e.g. a crowd event under a soiled or shaded panel).
  std::size_t surge_bs = 0;
  std::size_t surge_start_hour = 0;
  std::size_t surge_hours = 4 * kHoursPerWeek;
  double surge_multiplier = 1.8;
  double surge_solar_factor = 0.2;

  bool operator==(const SynthProfile&) const = default;
};

inline TraceBundle synth_traces(const SimulationConfig& config, const SynthProfile& p) {
  const std::size_t n = config.n;
  const std::size_t hours = config.horizon_hours;
  std::mt19937_64 rng(config.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto factor = [&](double sigma) { return std::max(0.0, 1.0 + sigma * gauss(rng)); };

  TraceBundle b;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = 1.0 + p.bs_scale_spread * (2.0 * unit(rng) - 1.0);

    HourlyTrace load{i, TraceKind::Load, std::vector<Wh>(hours)};
    for (std::size_t h = 0; h < hours; ++h) {
      const double hod = static_cast<double>(h % kHoursPerDay);
      auto bump = [&](double centre) {
        double d = std::abs(hod - centre);
        d = std::min(d, 24.0 - d);
        return std::exp(-0.5 * (d / p.peak_width_hours) * (d / p.peak_width_hours));
      };
      const double shape = p.load_base + p.morning_peak * bump(p.morning_peak_hour) + p.evening_peak * bump(p.evening_peak_hour);
      load.values[h] = scale * shape * factor(p.load_noise_sigma);
    }

    HourlyTrace solar{i, TraceKind::SolarHarvest, std::vector<Wh>(hours, 0.0)};
    const double daylight = static_cast<double>(p.sunset_hour) - static_cast<double>(p.sunrise_hour);
    double cloud = 1.0;
    for (std::size_t h = 0; h < hours; ++h) {
      const std::size_t hod = h % kHoursPerDay;
      if (hod == 0) cloud = factor(p.cloud_sigma);
      const double day = static_cast<double>(h / kHoursPerDay);
      const double season =
          1.0 - p.seasonal_amplitude * std::cos(2.0 * std::numbers::pi * (day - static_cast<double>(p.seasonal_low_day)) / 365.0);
      const double noise = factor(p.solar_noise_sigma);
      if (is_solar_night(hod, p.sunrise_hour, p.sunset_hour) || daylight <= 0.0) continue;
      const double arc = std::sin(std::numbers::pi * (static_cast<double>(hod) - static_cast<double>(p.sunrise_hour)) / daylight);
      solar.values[h] = p.solar_peak * arc * std::max(0.0, season) * cloud * noise;
    }

    if (p.solar_to_load_ratio) {
      Wh solar_sum = 0.0, load_sum = 0.0;
      for (std::size_t h = 0; h < hours; ++h) {
        solar_sum += solar.values[h];
        load_sum += load.values[h];
      }
      if (solar_sum > 0.0) {
        const double k = *p.solar_to_load_ratio * load_sum / solar_sum;
        for (auto& v : solar.values) v *= k;
      }
    }

    if (i == p.surge_bs) {
      for (std::size_t h = p.surge_start_hour; h < std::min(hours, p.surge_start_hour + p.surge_hours); ++h)
      {
        load.values[h] *= p.surge_multiplier;
        solar.values[h] *= p.surge_solar_factor;
      }
    }

    b.solar.push_back(std::move(solar));
    b.load.push_back(std::move(load));
  }
  return b;
}

}  // namespace dronegrid
