#pragma once
// Metric connections on flat periodic tori: Levi-Civita and Bismut
// coefficients, covariant derivatives, the codifferential, and the curvature
// contractions used by the Hermitian-geometry checks.
//
// Connection coefficient fields have valence q = 1, p = 2 with component
// order (a, b, c) = Gamma^a_{bc}, where b is the direction of differentiation:
// nabla_{e_b} e_c = Gamma^a_{bc} e_a.  The Bismut connection of a Hermitian
// pair (g, I) adds half the torsion of the flux form H = dc(omega_I):
//   nabla^B_X Y = D_X Y + 1/2 g^{-1} H(X, Y, .).

#include "gk/forms.hpp"
#include "gk/grid.hpp"

namespace gk {

inline Valence connection_valence() {
  Valence v;
  v.q = 1;
  v.p = 2;
  return v;
}

// Pointwise inverse metric field (valence q = 2).
TensorField metric_inverse(const TensorField& g);

// Fundamental 2-form of (g, I) as a dense array field:
// omega(X, Y) = g(I X, Y).
TensorField omega_form(const TensorField& g, const TensorField& I);

// Flux 3-form H = (d omega_I)(I., I., I.), the torsion of the Bismut
// connection (sign fixed by nabla^B I = 0); pluriclosed data makes it closed.
TensorField h_flux(const TensorField& g, const TensorField& I);

// Christoffel symbols of g, spectral derivatives throughout.
TensorField levi_civita(const TensorField& g);

// Bismut coefficients: levi_civita(g) + 1/2 g^{ad} H_{bcd}.
TensorField bismut(const TensorField& g, const TensorField& H);

// Covariant derivative along a connection.  The derivative slot is inserted
// as the first covariant slot: for T of valence (p, q) the result has
// component order (upper slots, derivative axis, lower slots).
TensorField cov_deriv(const TensorField& T, const TensorField& Gamma);

// Codifferential of a k-form: (d* f)_{a_2 .. a_k} = -g^{cb} (nabla f)_{c b a_2 ..},
// the formal adjoint of ext_d for the metric L2 pairing.
TensorField codiff(const TensorField& f, const TensorField& g);

// Ricci contraction Rc_{db} = R^a_{adb} of an arbitrary (possibly torsionful)
// connection, streamed so no rank-4 field is ever materialised.
TensorField ricci_of(const TensorField& Gamma);

// Levi-Civita Ricci tensor of g.
TensorField ricci_tensor(const TensorField& g);

// Bismut-Ricci 2-form of a Hermitian pair and its I-type split.
struct BismutRicci {
  TensorField rho;    // rho(X,Y) = 1/2 tr(Omega(X,Y) o I)
  TensorField rho11;  // 1/2 (rho + rho(I., I.))
  TensorField rho02;  // rho - rho11, the (2,0)+(0,2) part
};
BismutRicci bismut_ricci(const TensorField& g, const TensorField& I);

// Lee form theta(X) = (d* omega_I)(I X).
TensorField lee_form(const TensorField& g, const TensorField& I);

// Pointwise square of the flux: H2(X,Y) = H(X,e_i,e_j) H(Y,e_k,e_l) g^{ik} g^{jl}.
TensorField h_squared(const TensorField& g, const TensorField& H);

}  // namespace gk
