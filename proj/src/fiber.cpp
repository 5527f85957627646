#include "gk/fiber.hpp"

namespace gk {

namespace {

// Smallest/largest singular value guard for on-demand inverses.
bool invertible(const Mat& M, double cut = 1e-8) {
  Eigen::JacobiSVD<Mat> svd(M);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > cut * sv(0);
}

Mat skew_part(const Mat& S) { return 0.5 * (S - S.transpose()); }

}  // namespace

// ---------------------------------------------------------------------------
// BihermData

std::optional<Mat> BihermData::F_plus() const {
  // gated on [I, J]: -(I+J)(I-J) = [I, J], so both factors must be invertible
  if (!invertible(Mat(I * J - J * I))) return std::nullopt;
  return -2.0 * g * Mat(I + J).inverse();
}

std::optional<Mat> BihermData::F_minus() const {
  if (!invertible(Mat(I * J - J * I))) return std::nullopt;
  return -2.0 * g * Mat(I - J).inverse();
}

std::optional<Mat> BihermData::Omega() const {
  Mat s = sigma();
  if (!invertible(s)) return std::nullopt;
  return s.inverse();
}

void BihermData::validate(const Tol& tol) const {
  const int d = dim();
  require(d > 0 && d % 2 == 0, "BihermData", "tangent dimension must be even");
  require(g.rows() == d && g.cols() == d && b.rows() == d && b.cols() == d &&
              I.rows() == d && I.cols() == d && J.rows() == d && J.cols() == d,
          "BihermData", "field dimensions disagree");
  const Mat id = Mat::Identity(d, d);
  const double sI = 1.0 + I.squaredNorm(), sJ = 1.0 + J.squaredNorm();
  require((I * I + id).norm() <= tol.of(sI), "BihermData", "I^2 != -Id");
  require((J * J + id).norm() <= tol.of(sJ), "BihermData", "J^2 != -Id");
  require((g - g.transpose()).norm() <= tol.of(g.norm()), "BihermData",
          "g is not symmetric");
  require(positive_definite(g), "BihermData", "g is not positive definite");
  require((b + b.transpose()).norm() <= tol.of(b.norm()), "BihermData",
          "b is not skew");
  require((I.transpose() * g * I - g).norm() <= tol.of(g.norm() * sI),
          "BihermData", "g is not I-hermitian");
  require((J.transpose() * g * J - g).norm() <= tol.of(g.norm() * sJ),
          "BihermData", "g is not J-hermitian");
}

// ---------------------------------------------------------------------------
// Pairing

Mat pairing_matrix(int d) {
  Mat P = Mat::Zero(2 * d, 2 * d);
  P.topRightCorner(d, d) = 0.5 * Mat::Identity(d, d);
  P.bottomLeftCorner(d, d) = 0.5 * Mat::Identity(d, d);
  return P;
}

double pairing(const GenVector& v, const GenVector& w) {
  require(v.dim() == w.dim(), "pairing", "fiber dimension mismatch");
  return 0.5 * (v.xi.dot(w.X) + w.xi.dot(v.X));
}

cplx pairing(const CGenVector& v, const CGenVector& w) {
  require(v.dim() == w.dim(), "pairing", "fiber dimension mismatch");
  // bilinear (not hermitian) extension of the real pairing
  return 0.5 * ((v.xi.transpose() * w.X)(0, 0) + (w.xi.transpose() * v.X)(0, 0));
}

// ---------------------------------------------------------------------------
// B-transform and Phi_K

GenEndo b_transform(const TwoForm& K) {
  const int d = K.dim();
  const Mat id = Mat::Identity(d, d), z = Mat::Zero(d, d);
  return GenEndo::from_blocks(id, z, K.K, id);
}

GenEndo phi_k(const GenEndo& J, const TwoForm& K, const Tol& tol) {
  require(J.d == K.dim(), "phi_k", "fiber dimension mismatch");
  const Mat id = Mat::Identity(2 * J.d, 2 * J.d);
  require((J.m * J.m + id).norm() <= tol.of(1.0 + J.m.squaredNorm()), "phi_k",
          "J is not an almost complex structure");
  const Mat eK = b_transform(K).m;
  return GenEndo(J.m * eK * J.m + eK, J.d);
}

// ---------------------------------------------------------------------------
// Gualtieri map and its inverse

std::pair<GenEndo, GenEndo> gualtieri_map(const BihermData& bh,
                                          const Tol& tol) {
  bh.validate(tol);
  const int d = bh.dim();
  const Mat wI = bh.omega_I(), wJ = bh.omega_J();
  require(invertible(wI), "gualtieri_map", "omega_I is singular");
  require(invertible(wJ), "gualtieri_map", "omega_J is singular");
  const Mat wIi = wI.inverse(), wJi = wJ.inverse();

  auto upsilon = [&](double s) {  // s = +1 for J_1, -1 for J_2
    return GenEndo::from_blocks(
        0.5 * (bh.I + s * bh.J), -0.5 * (wIi - s * wJi),
        0.5 * (wI - s * wJ), -0.5 * (bh.I.transpose() + s * bh.J.transpose()));
  };
  const Mat eb = b_transform(TwoForm(bh.b)).m;
  const Mat ebi = b_transform(TwoForm(Mat(-bh.b))).m;
  GenEndo J1(eb * upsilon(+1.0).m * ebi, d);
  GenEndo J2(eb * upsilon(-1.0).m * ebi, d);
  return {J1, J2};
}

BihermData extract_biherm(const GenEndo& J1, const GenEndo& J2, double tol) {
  require(J1.d == J2.d, "extract_biherm", "fiber dimension mismatch");
  const int d = J1.d;
  const double scale = 1.0 + J1.m.norm() * J2.m.norm();
  require((J1.m * J2.m - J2.m * J1.m).norm() <= tol * scale, "extract_biherm",
          "input pair does not commute");

  const Mat G = -J1.m * J2.m;
  const Mat S = pairing_matrix(d) * G;
  require((S - S.transpose()).norm() <= tol * (1.0 + S.norm()) &&
              positive_definite(S),
          "extract_biherm", "generalized metric is not positive");

  const Mat ginv = G.topRightCorner(d, d);
  require((ginv - ginv.transpose()).norm() <= tol * (1.0 + ginv.norm()) &&
              positive_definite(ginv),
          "extract_biherm", "top-right block of G is not symmetric positive");
  const Mat g = ginv.inverse();
  const Mat b = -g * G.topLeftCorner(d, d);

  // Strip the b-shear and read I pm J off the top-left blocks.
  const Mat eb = b_transform(TwoForm(Mat(skew_part(b)))).m;
  const Mat ebi = b_transform(TwoForm(Mat(-skew_part(b)))).m;
  const Mat U1 = ebi * J1.m * eb, U2 = ebi * J2.m * eb;
  const Mat IpJ = 2.0 * U1.topLeftCorner(d, d);
  const Mat ImJ = 2.0 * U2.topLeftCorner(d, d);

  BihermData bh;
  bh.g = 0.5 * (g + g.transpose());
  bh.b = skew_part(b);
  bh.I = 0.5 * (IpJ + ImJ);
  bh.J = 0.5 * (IpJ - ImJ);
  return bh;
}

// ---------------------------------------------------------------------------
// Projectors

std::pair<CGenEndo, CGenEndo> projectors(const GenEndo& J) {
  const Mat id = Mat::Identity(2 * J.d, 2 * J.d);
  require((J.m * J.m + id).norm() <= 1e-8 * (1.0 + J.m.squaredNorm()),
          "projectors", "J is not an almost complex structure");
  const cplx i(0.0, 1.0);
  CMat Jm = J.m.cast<cplx>();
  CMat idc = CMat::Identity(2 * J.d, 2 * J.d);
  return {CGenEndo(CMat(0.5 * (idc - i * Jm)), J.d),
          CGenEndo(CMat(0.5 * (idc + i * Jm)), J.d)};
}

std::array<CGenEndo, 4> fourfold_projectors(const GenEndo& J1, const GenEndo& J2) {
  require(J1.d == J2.d, "fourfold_projectors", "fiber dimension mismatch");
  const double scale = 1.0 + J1.m.norm() * J2.m.norm();
  require((J1.m * J2.m - J2.m * J1.m).norm() <= 1e-8 * scale,
          "fourfold_projectors", "pair is not compatible");
  auto [p1, q1] = projectors(J1);
  auto [p2, q2] = projectors(J2);
  return {CGenEndo(CMat(p1.m * p2.m), J1.d), CGenEndo(CMat(p1.m * q2.m), J1.d),
          CGenEndo(CMat(q1.m * p2.m), J1.d), CGenEndo(CMat(q1.m * q2.m), J1.d)};
}

// ---------------------------------------------------------------------------
// (1,1) test and induced variation

Is11Result is_11(const TwoForm& K, const Mat& J, double tol) {
  Is11Result r;
  r.residual = (K.K * J + J.transpose() * K.K).norm();
  // Mixed absolute/relative gate: a purely relative one misclassifies
  // numerically negligible K (residual and norm both at round-off).
  r.ok = r.residual <= tol * (1.0 + K.K.norm());
  return r;
}

Variation induced_variation(const BihermData& bh, const TwoForm& K, double tol11) {
  require(K.dim() == bh.dim(), "induced_variation", "fiber dimension mismatch");
  require(is_11(K, bh.J, tol11).ok, "induced_variation",
          "K is not (1,1) with respect to J");
  const Mat &I = bh.I, &J = bh.J, &k = K.K;
  Variation v;
  v.g_dot = -0.5 * (k * I - I.transpose() * k);
  v.b_dot = -0.5 * (k * I + I.transpose() * k);
  v.omega_I_dot = v.g_dot * I;
  const Mat IJ = I * J;
  v.omega_J_dot = -0.5 * (k * IJ + IJ.transpose() * k);
  v.I_dot = Mat::Zero(bh.dim(), bh.dim());
  v.J_dot = 0.5 * (I * J - J * I) * bh.g.inverse() * k;
  return v;
}

// ---------------------------------------------------------------------------
// C_+ lift

GenVector c_plus_lift(const BihermData& bh, const Vec& X) {
  GenVector v;
  v.X = X;
  v.xi = (bh.b + bh.g) * X;
  return v;
}

CGenVector c_plus_lift(const BihermData& bh, const CVec& X) {
  CGenVector v;
  v.X = X;
  v.xi = (bh.b + bh.g).cast<cplx>() * X;
  return v;
}

// ---------------------------------------------------------------------------
// Random fibers

namespace {

// Standard complex structure: blocks (0 -1; 1 0) down the diagonal.
Mat standard_complex(int d) {
  Mat I0 = Mat::Zero(d, d);
  for (int k = 0; k + 1 < d; k += 2) {
    I0(k, k + 1) = -1.0;
    I0(k + 1, k) = 1.0;
  }
  return I0;
}

// Left-multiplication by the quaternions i and j on H = R^4.
Mat quaternion_i() {
  Mat L(4, 4);
  L << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  return L;
}
Mat quaternion_j() {
  Mat L(4, 4);
  L << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
  return L;
}

Mat block_diag_copies(const Mat& B, int copies) {
  const int s = static_cast<int>(B.rows());
  Mat M = Mat::Zero(s * copies, s * copies);
  for (int c = 0; c < copies; ++c) M.block(s * c, s * c, s, s) = B;
  return M;
}

Mat random_gaussian(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> N(0.0, 1.0);
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = N(rng);
  return M;
}

Mat random_orthogonal(std::mt19937_64& rng, int d) {
  Eigen::HouseholderQR<Mat> qr(random_gaussian(rng, d, d));
  Mat Q = qr.householderQ() * Mat::Identity(d, d);
  return Q;
}

}  // namespace

BihermData random_fiber(std::mt19937_64& rng, int n, bool anticommuting,
                        double b_scale) {
  const int d = 2 * n;
  require(d <= kMaxDim, "random_fiber", "fiber dimension exceeds capacity");
  require(!anticommuting || d % 4 == 0, "random_fiber",
          "anticommuting pairs need dimension divisible by 4");
  std::uniform_real_distribution<double> U(0.7, 1.3);

  // Well-conditioned Cholesky factor.
  Mat L = 0.25 * random_gaussian(rng, d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) L(i, j) = 0.0;
    L(i, i) = U(rng);
  }
  const Mat g = L * L.transpose();

  // Conjugating orthogonal complex structures by W = L^{-T} O produces
  // g-hermitian almost complex structures: W^T g W = Id.
  const Mat W = L.transpose().inverse() * random_orthogonal(rng, d);
  const Mat Wi = W.inverse();

  Mat I0, J0;
  if (anticommuting) {
    I0 = block_diag_copies(quaternion_i(), d / 4);
    J0 = block_diag_copies(quaternion_j(), d / 4);
  } else {
    I0 = standard_complex(d);
    const Mat R = random_orthogonal(rng, d);
    J0 = R * standard_complex(d) * R.transpose();
  }

  BihermData bh;
  bh.g = g;
  bh.b = b_scale * skew_part(random_gaussian(rng, d, d));
  bh.I = W * I0 * Wi;
  bh.J = W * J0 * Wi;
  return bh;
}

TwoForm random_two_form(std::mt19937_64& rng, int d, double scale) {
  return TwoForm(Mat(scale * skew_part(random_gaussian(rng, d, d))));
}

TwoForm random_11_two_form(std::mt19937_64& rng, const BihermData& bh,
                           double scale) {
  return TwoForm(proj11(random_two_form(rng, bh.dim(), scale).K, bh.J));
}

}  // namespace gk
