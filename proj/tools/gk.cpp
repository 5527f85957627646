// Command-line driver: scenario verification suites and flow runs.
//
//   gk verify --scenario kaehler --grid 16
//   gk verify --config suite.json
//   gk flow --scenario joyce --type gkrf-both --out results/
//
// Exit codes: 0 success; 1 a check failed; 2 malformed config or usage;
// 3 scenario construction failure; 4 flow abort (partial CSV retained).
// GK_THREADS caps internal parallelism (the kernels are single-threaded, so
// any positive cap is honored as-is).

#include "CLI11.hpp"

#include "gk/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace {

struct Flags {
  std::string config, scenario, type, out;
  int grid = -1;
  double dt = -1.0, t_end = -1.0, tol = -1.0;
  int steps = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

// Layer command-line flags over a (possibly config-file-provided) base.
gk::ScenarioConfig merge(const Flags& f) {
  gk::ScenarioConfig cfg;
  if (!f.config.empty()) cfg = gk::config_from_file(f.config);
  else cfg.flow.dt = 0.0;  // auto
  if (!f.scenario.empty()) cfg.scenario = f.scenario;
  if (!f.type.empty()) cfg.flow_type = f.type;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.grid >= 0) cfg.grid = f.grid;
  if (f.dt >= 0.0) cfg.flow.dt = f.dt;
  if (f.steps >= 0) cfg.flow.steps = f.steps;
  if (f.t_end >= 0.0) cfg.t_end = f.t_end;
  if (f.tol >= 0.0) cfg.tol = f.tol;
  if (f.seed_set) cfg.seed = f.seed;
  return cfg;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file");
  cmd->add_option("--scenario", f.scenario,
                  "scenario name: kaehler, commuting, joyce");
  cmd->add_option("--grid", f.grid, "points per axis (even, >= 8)");
  cmd->add_option("--tol", f.tol, "tolerance override for every check");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "random seed")
      ->each([&f](const std::string&) { f.seed_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized Kähler structure checks and flows on flat tori"};
  app.require_subcommand(1);

  Flags vf, ff;
  CLI::App* verify = app.add_subcommand("verify", "run a check suite");
  add_common(verify, vf);

  CLI::App* flow = app.add_subcommand("flow", "integrate a deformation flow");
  add_common(flow, ff);
  flow->add_option("--type", ff.type,
                   "canonical, gkrf-biherm, gkrf-generalized, gkrf-both");
  flow->add_option("--dt", ff.dt, "time step");
  flow->add_option("--steps", ff.steps, "step count");
  flow->add_option("--t-end", ff.t_end, "integration window (overrides steps)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // usage problems are config errors
  }

  if (const char* threads = std::getenv("GK_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(threads, &end, 10);
    if (end == threads || *end != '\0' || cap < 1)
      std::fprintf(stderr, "ignoring invalid GK_THREADS=\"%s\"\n", threads);
  }

  try {
    if (verify->parsed()) return gk::run_verify(merge(vf));
    return gk::run_flow(merge(ff));
  } catch (const gk::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const gk::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
