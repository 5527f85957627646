#pragma once
// Exterior and Lie calculus on flat periodic tori.
//
// Forms are dense antisymmetric covariant fields (see grid.hpp for the slot
// convention).  Every derivative below is pseudospectral, so all identities
// (d^2 = 0, Cartan formulas, Leibniz rules) hold to round-off on band-limited
// data.
//
// Two-form bookkeeping: a 2-form field stores the array K(e_a, e_b) at
// (row a, col b), while the pointwise linear algebra of fiber.hpp works with
// the matrix of the map X -> K(X, .).  The two are transposes of each other;
// map_of_array / array_of_map convert at the boundary.

#include "gk/grid.hpp"

namespace gk {

inline Mat map_of_array(const Mat& arr) { return arr.transpose(); }
inline Mat array_of_map(const Mat& m) { return m.transpose(); }

inline Valence form_valence(int k) {
  Valence v;
  v.p = k;
  v.q = 0;
  v.antisym = k >= 2;
  return v;
}
inline Valence vector_valence() {
  Valence v;
  v.q = 1;
  return v;
}
inline Valence endo_valence() {
  Valence v;
  v.p = 1;
  v.q = 1;
  return v;
}
inline Valence metric_valence() {
  Valence v;
  v.p = 2;
  return v;
}

// Exterior derivative of a k-form, k <= 2 (dense output).
TensorField ext_d(const TensorField& f);

// Frobenius norm of dH for a 3-form H, streamed one sorted component at a
// time so the rank-4 field is never materialised.
double closedness_residual(const TensorField& H);

// Pull back every covariant slot of f through the endomorphism field A:
// (A*f)(X_1, ..., X_k) = f(A X_1, ..., A X_k).
TensorField pullback_slots(const TensorField& f, const TensorField& A);

// d^c with respect to an almost complex structure field I:
//   (dc f)(X_0, ..., X_k) = -(df)(I X_0, ..., I X_k).
// For a function u this is -du o I, and d(dc u) = -did(u).
TensorField dc(const TensorField& f, const TensorField& I);

// did(u) = d(du o I), the raw potential operator appearing in the canonical
// deformation families (K = d(J du)); equals -dd^c u for dc above.
TensorField did(const TensorField& u, const TensorField& I);

// The classical i-del-delbar operator in this normalisation:
// ddbar = 1/2 d d^c = -1/2 d(du o I).  On flat C^n, ddbar(u) has
// dx^{2k} ^ dx^{2k+1} coefficients summing to +1/2 laplacian(u).
inline TensorField ddbar(const TensorField& u, const TensorField& I) {
  TensorField out = did(u, I);
  out *= -0.5;
  return out;
}

// Interior product i_X f (contracts the first slot).
TensorField interior(const TensorField& X, const TensorField& f);

// Index raise: sharp(alpha, g)^a = g^{ab} alpha_b.
TensorField sharp(const TensorField& alpha, const TensorField& g);

// Lie derivative of an arbitrary-valence tensor field along the vector field
// X (q = 1).  Uses one auxiliary field of T's size per axis.
TensorField lie(const TensorField& X, const TensorField& T);

}  // namespace gk
