// Command-line front end: run cases, generate synthetic traces, lint a manifest.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dronegrid.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> cases;
  std::string out;
  std::optional<std::size_t> horizon;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "manifest file (key = value)");
  cmd->add_option("--seed", o.seed, "RNG seed for synthetic traces");
  cmd->add_option("--case", o.cases, "case to run: baseline, static, optimal (repeatable)");
  cmd->add_option("--out", o.out, "output directory or file");
  cmd->add_option("--horizon-hours", o.horizon, "simulated hours");
}

dronegrid::RunManifest build_manifest(const Overrides& o) {
  using namespace dronegrid;
  RunManifest m = o.config.empty() ? RunManifest{} : load_manifest(o.config);
  if (o.config.empty() || m.output_dir == RunManifest{}.output_dir) {
    if (const char* env = std::getenv("DRONEGRID_OUTPUT_DIR"); env && *env) m.output_dir = env;
  }
  if (o.seed) m.config.rng_seed = *o.seed;
  if (o.horizon) m.config.horizon_hours = *o.horizon;
  if (!o.out.empty()) m.output_dir = o.out;
  if (!o.cases.empty()) {
    m.cases.clear();
    for (const auto& c : o.cases) {
      auto id = parse_case(c);
      if (!id) throw ConfigError("unknown case '" + c + "'");
      m.cases.push_back(*id);
    }
  }
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drone-assisted base station energy simulator"};
  app.require_subcommand(1);

  Overrides run_o, gen_o, val_o;
  auto* run = app.add_subcommand("run", "simulate the requested cases and write reports");
  add_common(run, run_o);
  auto* gen = app.add_subcommand("gen-traces", "write a synthetic trace file");
  add_common(gen, gen_o);
  auto* val = app.add_subcommand("validate", "check a manifest and its trace file");
  add_common(val, val_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto m = build_manifest(run_o);
      const auto summary = dronegrid::run_manifest(m);
      std::cout << summary.comparison_csv;
      std::cerr << "wrote " << m.output_dir.string() << "\n";
    } else if (*gen) {
      auto m = build_manifest(gen_o);
      const std::filesystem::path out = gen_o.out.empty() ? m.output_dir / "traces.csv" : std::filesystem::path(gen_o.out);
      if (auto v = m.config.violations(); !v.empty()) throw dronegrid::ConfigError(v.front());
      dronegrid::gen_traces(m.config, m.synth, out);
      std::cerr << "wrote " << out.string() << "\n";
    } else if (*val) {
      const auto problems = dronegrid::lint_manifest(build_manifest(val_o));
      for (const auto& p : problems) std::cerr << "error: " << p << "\n";
      if (!problems.empty()) return 1;
      std::cout << "ok\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
