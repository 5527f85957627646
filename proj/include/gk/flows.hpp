#pragma once
// Time integration of canonical deformations and of generalized Kähler-Ricci
// flow in its two formulations, with invariant monitoring.
//
// The integration variables are the bihermitian fields (g, b, J) with I held
// fixed; the generalized structures are recomputed for monitors and
// certification.  Right-hand sides, per deformation 2-form K (map k = arr^T):
//   g' = -1/2 [k, I],   b' = -1/2 {k, I},   J' = sigma k = 1/2 [I,J] g^{-1} k,
// and for the bihermitian Ricci-flow formulation J' = L_W J with
// W = 1/2 (theta_I - theta_J)^sharp instead (the two routes agreeing is the
// equivalence theorem this module's tests measure).

#include "gk/structures.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gk {

enum class Integrator { rk4, euler };
enum class KSource { potential, exact, bismut_ricci };

struct FlowConfig {
  double dt = 1e-2;
  int steps = 10;
  Integrator integrator = Integrator::rk4;
  KSource k_source = KSource::potential;
  TensorField u;  // scalar potential, used when k_source == potential
  TensorField a;  // 1-form, used when k_source == exact

  double k_tol = 1e-6;           // admissible closedness / (1,1) defect of K
  double rho_step_budget = 0.1;  // abort when ||K||_inf * dt exceeds this
                                 // (bismut_ricci source only)
  // When set, positivity loss reverts to the last good state and stops.
  // When unset, the record keeps running to `steps` for postmortems (per-step
  // generalized cross-checks are skipped while the metric is indefinite), and
  // the returned state is still the last positive one.
  bool abort_on_positivity = true;
  int certify_every = 0;  // 0 = ceil(steps / 10)
};

struct FlowRecord {
  // Column 0 is "t"; one row is appended after every completed step.
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Full certifications at t = 0, every certify_every steps, and at the end.
  std::vector<std::pair<double, CertifyReport>> certifications;
  bool completed = true;
  std::string abort_reason;
  double t_final = 0.0;

  double last(const std::string& column) const;  // value in the final row
  double max(const std::string& column) const;   // max over rows, NaNs skipped
};

struct FlowResult {
  GKState state;
  FlowRecord record;
};

// Canonical deformation flow driven by cfg.k_source.
FlowResult canonical_flow(const GKState& s0, const FlowConfig& cfg);

// Generalized Kähler-Ricci flow, bihermitian formulation: K = -rho_I with
// J transported by the Lee-form vector field.
FlowResult gkrf_biherm(const GKState& s0, const FlowConfig& cfg);

// Generalized Kähler-Ricci flow as a canonical deformation: K = -rho_I in
// the canonical right-hand sides (cfg.k_source is overridden).
FlowResult gkrf_generalized(const GKState& s0, const FlowConfig& cfg);

// Max-norm of the bihermitian field difference of two states (terminal
// agreement measure for the equivalence tests).
double state_distance(const GKState& x, const GKState& y);

}  // namespace gk
