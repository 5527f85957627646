#pragma once
// Sections of the generalized tangent bundle over a flat torus, the twisted
// Courant bracket, and the Nijenhuis integrability tensor of a generalized
// almost complex structure field.
//
// A GenVectorField pairs a vector field X with a 1-form field xi.  A
// GenEndoField stores the four blocks of a pointwise endomorphism of
// T (+) T* in the map convention of fiber.hpp:
//   (X, xi) |-> (A X + beta xi, B X + D xi).

#include "gk/fiber.hpp"
#include "gk/forms.hpp"
#include "gk/grid.hpp"

namespace gk {

struct GenVectorField {
  TensorField X;   // valence (0,1)
  TensorField xi;  // valence (1,0)

  GenVectorField() = default;
  explicit GenVectorField(const Grid& g)
      : X(g, vector_valence()), xi(g, form_valence(1)) {}
};

// Complexified section, stored as real and imaginary parts.
struct CGenVectorField {
  GenVectorField re, im;

  CGenVectorField() = default;
  explicit CGenVectorField(const Grid& g) : re(g), im(g) {}
};

struct GenEndoField {
  TensorField A;     // T -> T block
  TensorField beta;  // T* -> T block
  TensorField B;     // T -> T* block
  TensorField D;     // T* -> T* block

  GenEndoField() = default;
  explicit GenEndoField(const Grid& g)
      : A(g, endo_valence()), beta(g, endo_valence()), B(g, endo_valence()),
        D(g, endo_valence()) {}

  const Grid& grid() const { return A.grid; }
};

// Fiber matrix at a grid point / write-back.
GenEndo endo_at(const GenEndoField& J, std::size_t pt);
void set_endo(GenEndoField& J, std::size_t pt, const GenEndo& m);

// Constant-coefficient field from one fiber endomorphism.
GenEndoField constant_endo_field(const Grid& g, const GenEndo& m);

// Pointwise linear algebra on sections.
GenVectorField apply_endo(const GenEndoField& J, const GenVectorField& v);
CGenVectorField apply_endo(const GenEndoField& J, const CGenVectorField& v);

// Shear a section by a 2-form field (array storage): xi += K(X, .).
GenVectorField b_shear(const TensorField& K, const GenVectorField& v);

// Frame section e_k (k < 2 dim: tangent frame first, then covector frame).
GenVectorField frame_section(const Grid& g, int k);

double max_abs(const GenVectorField& v);
double max_abs(const CGenVectorField& v);

CGenVectorField operator-(const CGenVectorField& a, const CGenVectorField& b);

// Twisted Courant bracket
//   [X+xi, Y+eta] = [X,Y] + L_X eta - L_Y xi + 1/2 d(xi(Y) - eta(X)) + i_Y i_X H.
// H may be null (untwisted).  If dh_residual is non-null it receives the
// streamed closedness residual of H (0 when H is null) as a warning channel.
GenVectorField courant(const GenVectorField& v, const GenVectorField& w,
                       const TensorField* H, double* dh_residual = nullptr);
CGenVectorField courant(const CGenVectorField& v, const CGenVectorField& w,
                        const TensorField* H);

// Nijenhuis tensor N_J(x, y) = pi_{0,1} [pi_{1,0} x, pi_{1,0} y] of a
// generalized almost complex structure field, evaluated on one pair of
// sections through the spectral Courant bracket (reference path).
CGenVectorField nijenhuis_pair(const GenEndoField& J, const TensorField* H,
                               const CGenVectorField& x, const CGenVectorField& y);

// Max norm of N_J over all coordinate-frame pairs.  Streams the precomputed
// first derivatives of J pointwise instead of running per-pair transforms;
// agrees with nijenhuis_pair to round-off (tested) and is the certification
// fast path.
double nijenhuis_norm(const GenEndoField& J, const TensorField* H);

}  // namespace gk
