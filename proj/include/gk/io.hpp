#pragma once
// Scenario configuration, artifact writers, and the two CLI entry points.
//
// Config format: a single JSON object (schema documented in the README).
// Artifacts: report.json (check results), monitors.csv (per-step flow record
// or per-check summary), state.bin (binary field container: header n, N,
// valence, flags as little-endian uint32, payload little-endian float64 in
// grid-point-major, component-minor order).  Identical config + seed produce
// byte-identical artifacts.

#include "gk/verify.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gk {

// Thrown for malformed configuration (CLI maps it to exit code 2, as opposed
// to scenario-construction failures, which exit with 3).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// One plane-wave term of a potential: coeff * trig(wave . x).
struct ModeSpec {
  std::vector<int> wave;
  double coeff = 1.0;
  bool cosine = false;  // sin by default
};

struct PotentialSpec {
  double amplitude = 0.0;  // overall scale; 0 = use the scenario default
  std::vector<ModeSpec> modes;
};

struct ScenarioConfig {
  std::string scenario;  // kaehler | commuting | joyce
  int grid = 0;          // points per axis; 0 = scenario default (16)
  std::uint64_t seed = 1;
  double tol = 0.0;  // overrides every selected check's tolerance when > 0

  PotentialSpec potential;        // u  (kaehler, joyce, commuting "+" factor)
  PotentialSpec potential_minus;  // commuting "-" factor only
  double deform_time = 0.15;      // joyce constructor integration window
  double deform_dt = 0.03;

  // flow run description
  std::string flow_type = "canonical";  // canonical | gkrf-biherm |
                                        // gkrf-generalized | gkrf-both
  FlowConfig flow;                      // dt = 0 selects per-type defaults
  double t_end = 0.0;                   // > 0 wins over flow.steps

  std::vector<std::string> checks;  // empty = default fast suite
  std::string out_dir = ".";
};

// Parse / validate.  Both throw ConfigError with a diagnostic.
ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig config_from_file(const std::string& path);
// Post-merge validation used by the CLI after flags are applied.
void validate_config(const ScenarioConfig& cfg);

// Sampled potential field for a spec (scenario defaults applied when the
// mode list is empty).
TensorField sample_potential(const Grid& g, const PotentialSpec& spec,
                             const std::string& scenario, bool minus_factor);

// Construct the configured scenario state (propagates construction errors).
GKState build_scenario(const ScenarioConfig& cfg);

// Binary field container (format in the header comment above).
void write_field(std::ostream& os, const TensorField& f);
TensorField read_field(std::istream& is);
// State container: uint32 field count, then per field a uint32 name length,
// the name bytes, and the field container.  Writes g, b, I, J.
void write_state(std::ostream& os, const GKState& s);
std::vector<std::pair<std::string, TensorField>> read_state(std::istream& is);

// CSV with a header row; doubles printed with round-trip precision.
std::string record_csv(const FlowRecord& rec);
std::string checks_csv(const std::vector<CheckResult>& checks);

// Entry points (exit-status contract):
//   run_verify: 0 all checks pass, 1 some check fails (a check that throws
//   is recorded as failed with the message in its notes), 3 scenario
//   construction failure.  Writes report.json and monitors.csv.
//   run_flow: 0 completed, 3 construction failure, 4 flow abort (partial
//   monitors.csv retained).  Writes monitors.csv and state.bin; gkrf-both
//   writes *_generalized variants too and prints the terminal difference.
// Malformed configs throw ConfigError before either runs (CLI exit 2).
int run_verify(const ScenarioConfig& cfg);
int run_flow(const ScenarioConfig& cfg);

}  // namespace gk
