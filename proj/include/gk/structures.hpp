#pragma once
// Generalized Kähler states on flat tori: the state container with cached
// derived fields, certification, and constructors for the three example
// families (Kähler torus, commuting product, hyperkähler T^4 with its
// Hamiltonian deformation).

#include "gk/connection.hpp"
#include "gk/fiber.hpp"
#include "gk/genfield.hpp"

namespace gk {

// Bihermitian data (g, b, I, J) as fields, with the derived quantities every
// consumer needs cached at assembly time:
//   omega_I, omega_J : Hermitian forms g(I., .), g(J., .)  (array storage)
//   H                : torsion 3-form of the I-Bismut connection
//   sigma            : real Poisson tensor 1/2 [I, J] g^{-1}  (T* -> T)
//   J1, J2           : the associated generalized complex structure pair
struct GKState {
  Grid grid;
  TensorField g;  // symmetric positive, valence (2,0) covariant
  TensorField b;  // 2-form, array storage
  TensorField I;  // endomorphism field, I^2 = -1
  TensorField J;  // endomorphism field, J^2 = -1

  TensorField omega_I, omega_J;  // 2-forms, array storage
  TensorField H;                 // 3-form
  TensorField sigma;             // valence (0,2): sigma^{ab}
  GenEndoField J1, J2;
};

// Admissible pointwise algebraic defect when assembling states: fields
// produced by time integration satisfy the constraints (squares, hermiticity)
// only to integration accuracy, so assembly gates at a coarse sanity level
// and certify() reports the exact residuals.
inline constexpr Tol kAssemblyTol{1e-4, 1e-4};

// Assemble a state from bihermitian fields, computing every cached quantity.
GKState make_state(TensorField g, TensorField b, TensorField I, TensorField J);

// Read one fiber's bihermitian data (maps) at a grid point.
BihermData biherm_at(const GKState& s, std::size_t pt);

// Certification: every structural invariant as a residual.
struct CertifyReport {
  double fiber_residual = 0.0;      // pointwise algebra: squares, symmetry,
                                    // skewness, bi-Hermiticity of g
  double torsion_residual = 0.0;    // Bismut torsions of (g,I) and (g,J) sum to 0
  double dH_residual = 0.0;         // closedness of the cached torsion
  double nijenhuis_j1 = 0.0;        // integrability of J1 against H - db
  double nijenhuis_j2 = 0.0;        // integrability of J2 against H - db
  double cache_residual = 0.0;      // cached fields vs recomputation from (g,b,I,J)
  double positivity_margin = 0.0;   // smallest eigenvalue of g over the grid

  double worst() const;
  bool pass(double tol) const { return worst() <= tol && positivity_margin > 0.0; }
};

CertifyReport certify(const GKState& s);

// ---------------------------------------------------------------------------
// Deformation 2-forms (array storage).

// K = d(J du): closed by construction and (1,1) for the state's J.
TensorField potential_two_form(const GKState& s, const TensorField& u);
// K = da for a 1-form field a.
TensorField exact_two_form(const GKState& s, const TensorField& a);

// ---------------------------------------------------------------------------
// Example constructors.

// Standard complex structure pairing axes (0,1), (2,3), ... on T^{2n}.
Mat standard_complex_structure(int n);

// Kähler torus: omega = omega_0 + d(I du), I = J, b = 0.  Throws on loss of
// positivity.
GKState kaehler_torus(const TensorField& u);

// T^4 = T^2 x T^2 with I = (J_+, J_-), J = (J_+, -J_-) and per-factor Kähler
// potentials (each must depend only on its factor's coordinates for the
// product to stay generalized Kähler; certification catches violations).
GKState commuting_product(const TensorField& u_plus, const TensorField& u_minus);

// Flat hyperkähler T^4 from the quaternion frame: g = Id, I = L_i, J = L_j,
// sigma = L_k invertible.
GKState hyperkaehler_t4(int N);

// Hamiltonian deformation of the hyperkähler state: integrates
// J' = L_{sigma du} J with I, Omega = sigma^{-1} fixed, tracking F_pm by
// F' = d(J_t du) and recovering the metric from g = -1/2 F_+ (I + J_t),
// cross-checked against -1/2 F_-(I - J_t) and the sigma-recovery
// 1/2 Omega [I, J_t].
struct JoyceDiagnostics {
  double t_reached = 0.0;
  bool completed = false;
  double f_cross_residual = 0.0;      // F_+ vs F_- metric recovery gap
  double sigma_recovery_residual = 0.0;  // g vs 1/2 Omega [I, J_t]
  double sigma_drift = 0.0;           // sigma(final) vs sigma(initial)
};

GKState joyce_deform(const GKState& hk, const TensorField& u, double t_end,
                     double dt, JoyceDiagnostics* diag = nullptr);

}  // namespace gk
