#pragma once
// Exact pointwise linear algebra on the fiber V = T_p + T*_p of a
// 2n-dimensional manifold: the neutral pairing, B-field transforms, the
// deformation operator Phi_K, the Gualtieri map between bihermitian data and
// pairs of generalized complex structures, eigenbundle projectors, and the
// induced first-order variation of the bihermitian data under Phi_K.
//
// Index conventions (used everywhere downstream):
//   * every 2-tensor (g, b, omega, K) is stored as the matrix of its
//     associated map T -> T*, i.e. X |-> T(X, .); so omega_I = g*I as a
//     matrix product, and the dual of an endomorphism is its transpose;
//   * [K, I] = K I - I^T K and {K, I} = K I + I^T K, mixing a map T -> T*
//     with an endomorphism of T;
//   * a generalized endomorphism acts on (X, xi) by (A X + beta xi,
//     B X + D xi), stored as one (4n x 4n) matrix in (T, T*) block order.

#include "gk/common.hpp"

#include <array>
#include <optional>
#include <utility>

namespace gk {

// ---------------------------------------------------------------------------
// Generalized vectors X + xi.

template <class S>
struct GenVectorT {
  Eigen::Matrix<S, Eigen::Dynamic, 1, 0, kMaxDim, 1> X;   // tangent part
  Eigen::Matrix<S, Eigen::Dynamic, 1, 0, kMaxDim, 1> xi;  // cotangent part

  int dim() const { return static_cast<int>(X.size()); }

  Eigen::Matrix<S, Eigen::Dynamic, 1, 0, kMaxGen, 1> stacked() const {
    Eigen::Matrix<S, Eigen::Dynamic, 1, 0, kMaxGen, 1> v(2 * dim());
    v.head(dim()) = X;
    v.tail(dim()) = xi;
    return v;
  }
  static GenVectorT from_stacked(
      const Eigen::Matrix<S, Eigen::Dynamic, 1, 0, kMaxGen, 1>& v) {
    const int d = static_cast<int>(v.size()) / 2;
    GenVectorT out;
    out.X = v.head(d);
    out.xi = v.tail(d);
    return out;
  }
};

using GenVector = GenVectorT<double>;
using CGenVector = GenVectorT<cplx>;

// ---------------------------------------------------------------------------
// Generalized endomorphisms of T + T*.

template <class S>
struct GenEndoT {
  using MatS = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGen, kMaxGen>;

  MatS m;     // full (4n x 4n) matrix in (T, T*) block order
  int d = 0;  // tangent dimension 2n

  GenEndoT() = default;
  GenEndoT(MatS full, int dim) : m(std::move(full)), d(dim) {}

  // Block accessors: action on (X, xi) is (A X + beta xi, B X + D xi).
  MatS A() const { return m.topLeftCorner(d, d); }
  MatS beta() const { return m.topRightCorner(d, d); }
  MatS B() const { return m.bottomLeftCorner(d, d); }
  MatS D() const { return m.bottomRightCorner(d, d); }

  static GenEndoT from_blocks(const MatS& A, const MatS& beta, const MatS& B,
                              const MatS& D) {
    const int d = static_cast<int>(A.rows());
    require(A.cols() == d && beta.rows() == d && beta.cols() == d &&
                B.rows() == d && B.cols() == d && D.rows() == d && D.cols() == d,
            "GenEndo", "block dimensions disagree");
    MatS m(2 * d, 2 * d);
    m.topLeftCorner(d, d) = A;
    m.topRightCorner(d, d) = beta;
    m.bottomLeftCorner(d, d) = B;
    m.bottomRightCorner(d, d) = D;
    return GenEndoT(std::move(m), d);
  }
  static GenEndoT identity(int d) {
    return GenEndoT(MatS::Identity(2 * d, 2 * d), d);
  }

  GenVectorT<S> apply(const GenVectorT<S>& v) const {
    require(v.dim() == d, "GenEndo", "fiber dimension mismatch");
    return GenVectorT<S>::from_stacked(m * v.stacked());
  }
};

using GenEndo = GenEndoT<double>;
using CGenEndo = GenEndoT<cplx>;

inline GenEndo compose(const GenEndo& a, const GenEndo& b) {
  require(a.d == b.d, "compose", "fiber dimension mismatch");
  return GenEndo(a.m * b.m, a.d);
}

inline CGenEndo complexify(const GenEndo& a) {
  return CGenEndo(a.m.cast<cplx>(), a.d);
}

// ---------------------------------------------------------------------------
// Two-forms K, stored as the skew matrix of the map T -> T*.

struct TwoForm {
  Mat K;

  TwoForm() = default;
  explicit TwoForm(Mat k, const Tol& tol = Tol{}) : K(std::move(k)) {
    require((K + K.transpose()).norm() <= tol.of(K.norm()), "TwoForm",
            "matrix is not skew-symmetric");
  }
  int dim() const { return static_cast<int>(K.rows()); }
  // K(X, Y) with the map convention K: X |-> K(X, .).
  double evaluate(const Vec& X, const Vec& Y) const { return (K * X).dot(Y); }
};

// Projection of K onto (1,1)-forms with respect to an almost complex J:
// K^{1,1} = 1/2 (K + J^T K J); stable under transposition, preserves skewness.
inline Mat proj11(const Mat& K, const Mat& J) {
  return 0.5 * (K + J.transpose() * K * J);
}

// ---------------------------------------------------------------------------
// Bihermitian fiber data.

struct BihermData {
  Mat g;  // symmetric positive map T -> T*
  Mat b;  // skew map T -> T*
  Mat I;  // endomorphism of T, I^2 = -1
  Mat J;  // endomorphism of T, J^2 = -1

  int dim() const { return static_cast<int>(g.rows()); }

  Mat omega_I() const { return g * I; }
  Mat omega_J() const { return g * J; }
  // Real Poisson tensor sigma = 1/2 [I, J] g^{-1}, a map T* -> T.
  Mat sigma() const { return 0.5 * (I * J - J * I) * g.inverse(); }
  Mat Q() const { return -I * J; }

  // F_pm = -2 g (I pm J)^{-1} and Omega = sigma^{-1} exist only where [I, J]
  // is invertible; absence is signaled, not an error (the Kaehler and
  // commuting examples have [I, J] = 0 by design).
  std::optional<Mat> F_plus() const;
  std::optional<Mat> F_minus() const;
  std::optional<Mat> Omega() const;

  // Throws if the structural invariants fail beyond the tolerance:
  // I^2 = J^2 = -1, g symmetric positive, b skew, g(I.,I.) = g(J.,J.) = g.
  void validate(const Tol& tol = Tol{}) const;
};

// ---------------------------------------------------------------------------
// Operations.

// Matrix of the symmetric neutral pairing <X+xi, Y+eta> = 1/2(xi(Y) + eta(X)).
Mat pairing_matrix(int d);

double pairing(const GenVector& v, const GenVector& w);
cplx pairing(const CGenVector& v, const CGenVector& w);  // bilinear extension

// e^K = (Id, 0; K, Id): shear by a two-form.
GenEndo b_transform(const TwoForm& K);

// Phi_K(J) = J e^K J + e^K, equal to [J, e^K J] when J^2 = -1.  `tol` bounds
// the admissible defect of J^2 + 1 (loosen for time-integrated inputs).
GenEndo phi_k(const GenEndo& J, const TwoForm& K,
              const Tol& tol = Tol{1e-8, 1e-8});

// Bihermitian data -> pair of generalized complex structures
//   J_{1/2} = 1/2 e^b ( I pm J , -(omega_I^{-1} mp omega_J^{-1})
//                     ; omega_I mp omega_J , -(I* pm J*) ) e^{-b}.
// `tol` bounds the admissible algebraic defect of the input (states produced
// by time integration satisfy the pointwise constraints only to integration
// accuracy).
std::pair<GenEndo, GenEndo> gualtieri_map(const BihermData& bh,
                                          const Tol& tol = Tol{});

// Inverse of the Gualtieri map: reads (g, b) off G = -J1 J2 and (I, J) off
// the top-left blocks of e^{-b} J_{1/2} e^{b}.  `tol` bounds the admissible
// commutation/positivity defect of the input pair (finite-difference probes
// feed pairs that are compatible only to O(h^2)).
BihermData extract_biherm(const GenEndo& J1, const GenEndo& J2,
                          double tol = 1e-8);

// Complexified eigenbundle projectors (pi_{1,0}, pi_{0,1}) = (1/2(1 - iJ),
// 1/2(1 + iJ)); pi_{1,0} projects onto the +i eigenbundle L.
std::pair<CGenEndo, CGenEndo> projectors(const GenEndo& J);

// Projectors onto L1 cap L2, L1 cap bar L2, bar L1 cap L2, bar L1 cap bar L2
// for a commuting pair; each has rank n and they resolve the identity.
std::array<CGenEndo, 4> fourfold_projectors(const GenEndo& J1, const GenEndo& J2);

// K is of type (1,1) with respect to J iff K J = -J* K.
struct Is11Result {
  bool ok = false;
  double residual = 0.0;  // Frobenius norm of K J + J^T K
};
Is11Result is_11(const TwoForm& K, const Mat& J, double tol = 1e-8);

// First-order variation of the bihermitian data under the canonical
// deformation driven by K (required to be (1,1) with respect to J):
//   g' = -1/2 [K, I],  b' = -1/2 {K, I},  omega_I' = -1/2 [K, I] I,
//   omega_J' = -1/2 {K, I J},  I' = 0,  J' = 1/2 [I, J] g^{-1} K.
struct Variation {
  Mat g_dot, b_dot, omega_I_dot, omega_J_dot, I_dot, J_dot;
};
Variation induced_variation(const BihermData& bh, const TwoForm& K,
                            double tol11 = 1e-8);

// Lift of a (possibly complex) tangent vector into C_+ = graph(b + g),
// the +1 eigenbundle of the generalized metric.
GenVector c_plus_lift(const BihermData& bh, const Vec& X);
CGenVector c_plus_lift(const BihermData& bh, const CVec& X);

// ---------------------------------------------------------------------------
// Random fibers (test and verification support).

// A random bihermitian fiber: g = L L^T from a well-conditioned Cholesky
// factor, I and J conjugates of orthogonal complex structures by W = L^{-T} O
// (which makes them g-compatible by construction), b random skew.
// anticommuting = true yields I J = -J I (requires 2n divisible by 4);
// otherwise the pair is generic.
BihermData random_fiber(std::mt19937_64& rng, int n, bool anticommuting = false,
                        double b_scale = 0.3);

// Random skew K (map T -> T*), entries of order `scale`.
TwoForm random_two_form(std::mt19937_64& rng, int d, double scale = 1.0);

// Random K of type (1,1) with respect to bh.J.
TwoForm random_11_two_form(std::mt19937_64& rng, const BihermData& bh,
                           double scale = 1.0);

}  // namespace gk
