#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gk/fiber.hpp"

#include <cmath>

using namespace gk;

namespace {

GenVector gen(const Vec& X, const Vec& xi) {
  GenVector v;
  v.X = X;
  v.xi = xi;
  return v;
}

Vec unit(int d, int k) {
  Vec e = Vec::Zero(d);
  e(k) = 1.0;
  return e;
}

// Kaehler fiber in dimension d: I = J = standard complex structure, b = 0.
BihermData kaehler_fiber(int d) {
  BihermData bh;
  bh.g = Mat::Identity(d, d);
  bh.b = Mat::Zero(d, d);
  Mat I0 = Mat::Zero(d, d);
  for (int k = 0; k + 1 < d; k += 2) {
    I0(k, k + 1) = -1.0;
    I0(k + 1, k) = 1.0;
  }
  bh.I = I0;
  bh.J = I0;
  return bh;
}

// Commuting fiber on R^4: I = I0 + I0, J = I0 + (-I0), so Q = -IJ splits
// T into the first (Q=+1) and second (Q=-1) coordinate planes.
BihermData commuting_fiber() {
  BihermData bh = kaehler_fiber(4);
  bh.J.block(2, 2, 2, 2) *= -1.0;
  return bh;
}

double rank_of(const CMat& M, double tol = 1e-8) {
  Eigen::ColPivHouseholderQR<CMat> qr(M);
  qr.setThreshold(tol);
  return static_cast<double>(qr.rank());
}

}  // namespace

TEST_CASE("neutral pairing: values, symmetry, bilinearity") {
  const int d = 4;
  const Vec z = Vec::Zero(d);
  CHECK(pairing(gen(unit(d, 0), z), gen(z, unit(d, 0))) == doctest::Approx(0.5));
  CHECK(pairing(gen(unit(d, 0), z), gen(unit(d, 1), z)) == doctest::Approx(0.0));

  auto rng = make_rng(11);
  std::normal_distribution<double> N(0.0, 1.0);
  auto rv = [&] {
    Vec X(d), xi(d);
    for (int i = 0; i < d; ++i) {
      X(i) = N(rng);
      xi(i) = N(rng);
    }
    return gen(X, xi);
  };
  for (int trial = 0; trial < 20; ++trial) {
    GenVector v = rv(), w = rv();
    CHECK(pairing(v, w) == doctest::Approx(pairing(w, v)));
    CHECK(pairing(v, v) == doctest::Approx(v.xi.dot(v.X)));
    // matrix representation
    CHECK(v.stacked().dot(pairing_matrix(d) * w.stacked()) ==
          doctest::Approx(pairing(v, w)));
  }
}

TEST_CASE("b_transform: identity, group law, inverse, pairing isometry") {
  const int d = 4;
  auto rng = make_rng(12);
  CHECK((b_transform(TwoForm(Mat(Mat::Zero(d, d)))).m -
         Mat::Identity(2 * d, 2 * d))
            .norm() == doctest::Approx(0.0));

  TwoForm K = random_two_form(rng, d), K2 = random_two_form(rng, d);
  CHECK((compose(b_transform(K), b_transform(K2)).m -
         b_transform(TwoForm(Mat(K.K + K2.K))).m)
            .norm() < 1e-13);
  CHECK((compose(b_transform(K), b_transform(TwoForm(Mat(-K.K)))).m -
         Mat::Identity(2 * d, 2 * d))
            .norm() < 1e-13);

  std::normal_distribution<double> N(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    GenVector v, w;
    v.X = Vec::NullaryExpr(d, [&](int) { return N(rng); });
    v.xi = Vec::NullaryExpr(d, [&](int) { return N(rng); });
    w.X = Vec::NullaryExpr(d, [&](int) { return N(rng); });
    w.xi = Vec::NullaryExpr(d, [&](int) { return N(rng); });
    GenEndo eK = b_transform(random_two_form(rng, d));
    CHECK(std::abs(pairing(eK.apply(v), eK.apply(w)) - pairing(v, w)) < 1e-13);
  }

  Mat notskew = Mat::Identity(d, d);
  CHECK_THROWS_AS(TwoForm{notskew}, Error);
}

TEST_CASE("phi_k: zero at K=0 and anticommutation with the structure") {
  auto rng = make_rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    BihermData bh = random_fiber(rng, 2);
    auto [J1, J2] = gualtieri_map(bh);
    const int d = bh.dim();
    CHECK(phi_k(J1, TwoForm(Mat(Mat::Zero(d, d)))).m.norm() ==
          doctest::Approx(0.0));
    TwoForm K = random_two_form(rng, d);
    for (const GenEndo& J : {J1, J2}) {
      GenEndo P = phi_k(J, K);
      CHECK((P.m * J.m + J.m * P.m).norm() < 1e-12 * (1.0 + K.K.norm()));
    }
  }
  GenEndo bad = GenEndo::identity(4);
  CHECK_THROWS_AS(phi_k(bad, random_two_form(rng, 4)), Error);
}

TEST_CASE("phi_k on a Kaehler fiber: block values") {
  BihermData bh = kaehler_fiber(4);
  auto [J1, J2] = gualtieri_map(bh);
  auto rng = make_rng(14);
  TwoForm K = random_two_form(rng, 4);
  const Mat w = bh.omega_I(), wi = w.inverse();

  // symplectic-type structure: Phi_K = (0, w^{-1} K w^{-1}; K, 0)
  GenEndo P2 = phi_k(J2, K);
  CHECK(P2.A().norm() < 1e-13);
  CHECK(P2.D().norm() < 1e-13);
  CHECK((P2.beta() - wi * K.K * wi).norm() < 1e-13);
  CHECK((P2.B() - K.K).norm() < 1e-13);

  // complex-type structure: Phi_K vanishes exactly on (1,1) forms
  TwoForm K11 = random_11_two_form(rng, bh);
  CHECK(phi_k(J1, K11).m.norm() < 1e-13);
  // ... and generically not otherwise
  TwoForm K20(Mat(K.K - proj11(K.K, bh.I)));
  CHECK(phi_k(J1, K20).m.norm() > 1e-3 * K20.K.norm());
}

TEST_CASE("gualtieri_map: Kaehler special case and b-factorization") {
  BihermData bh = kaehler_fiber(4);
  auto [J1, J2] = gualtieri_map(bh);
  CHECK((J1.A() - bh.I).norm() < 1e-14);
  CHECK(J1.beta().norm() < 1e-14);
  CHECK(J1.B().norm() < 1e-14);
  CHECK((J1.D() + bh.I.transpose()).norm() < 1e-14);
  const Mat w = bh.omega_I();
  CHECK(J2.A().norm() < 1e-14);
  CHECK((J2.beta() + w.inverse()).norm() < 1e-14);
  CHECK((J2.B() - w).norm() < 1e-14);
  CHECK(J2.D().norm() < 1e-14);

  // conjugation: map(g,b,I,J) = e^b map(g,0,I,J) e^{-b}
  auto rng = make_rng(15);
  BihermData bhb = random_fiber(rng, 2, false, 0.5);
  BihermData bh0 = bhb;
  bh0.b.setZero();
  auto [A1, A2] = gualtieri_map(bhb);
  auto [B1, B2] = gualtieri_map(bh0);
  const Mat eb = b_transform(TwoForm(bhb.b)).m;
  const Mat ebi = b_transform(TwoForm(Mat(-bhb.b))).m;
  CHECK((A1.m - eb * B1.m * ebi).norm() < 1e-12);
  CHECK((A2.m - eb * B2.m * ebi).norm() < 1e-12);
}

TEST_CASE("gualtieri_map postconditions on random fibers") {
  auto rng = make_rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);  // 2n in {2,4,6}
    const bool anti = (n == 2) && (trial % 2 == 0);
    BihermData bh = random_fiber(rng, n, anti);
    auto [J1, J2] = gualtieri_map(bh);
    const int d = bh.dim();
    const Mat id = Mat::Identity(2 * d, 2 * d);
    const Mat P = pairing_matrix(d);
    CHECK((J1.m * J1.m + id).norm() < 1e-12 * (1.0 + J1.m.squaredNorm()));
    CHECK((J2.m * J2.m + id).norm() < 1e-12 * (1.0 + J2.m.squaredNorm()));
    const Mat S1 = P * J1.m, S2 = P * J2.m;
    CHECK((S1 + S1.transpose()).norm() < 1e-12 * (1.0 + J1.m.norm()));
    CHECK((S2 + S2.transpose()).norm() < 1e-12 * (1.0 + J2.m.norm()));
    CHECK((J1.m * J2.m - J2.m * J1.m).norm() <
          1e-12 * (1.0 + J1.m.norm() * J2.m.norm()));
    const Mat G = P * (-J1.m * J2.m);
    CHECK((G - G.transpose()).norm() < 1e-12 * (1.0 + G.norm()));
    CHECK(positive_definite(G));
  }
  BihermData bad = kaehler_fiber(4);
  bad.I.setZero();
  CHECK_THROWS_AS(gualtieri_map(bad), Error);
}

TEST_CASE("extract_biherm: round trip, Kaehler pair, commutation guard") {
  auto rng = make_rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    BihermData bh = random_fiber(rng, n, (n == 2) && (trial % 3 == 0));
    auto [J1, J2] = gualtieri_map(bh);
    BihermData out = extract_biherm(J1, J2);
    CHECK((out.g - bh.g).norm() < 1e-12 * (1.0 + bh.g.norm()));
    CHECK((out.b - bh.b).norm() < 1e-12 * (1.0 + bh.b.norm()));
    CHECK((out.I - bh.I).norm() < 1e-12 * (1.0 + bh.I.norm()));
    CHECK((out.J - bh.J).norm() < 1e-12 * (1.0 + bh.J.norm()));
  }

  BihermData kf = kaehler_fiber(4);
  auto [J1, J2] = gualtieri_map(kf);
  BihermData out = extract_biherm(J1, J2);
  CHECK((out.g - kf.g).norm() < 1e-13);
  CHECK(out.b.norm() < 1e-13);
  CHECK((out.I - out.J).norm() < 1e-13);

  // a non-commuting pair must be rejected
  auto rngb = make_rng(18);
  auto [A1, A2] = gualtieri_map(random_fiber(rngb, 2));
  auto [B1, B2] = gualtieri_map(random_fiber(rngb, 2));
  CHECK_THROWS_AS(extract_biherm(A1, B2), Error);
}

TEST_CASE("projectors: algebra and the covector example") {
  auto rng = make_rng(19);
  BihermData bh = random_fiber(rng, 2);
  auto [J1, J2] = gualtieri_map(bh);
  for (const GenEndo& J : {J1, J2}) {
    auto [p, q] = projectors(J);
    const int m = 2 * J.d;
    CHECK((p.m + q.m - CMat::Identity(m, m)).norm() < 1e-12);
    CHECK((p.m * p.m - p.m).norm() < 1e-12);
    CHECK((p.m * q.m).norm() < 1e-12);
    CHECK((J.m.cast<cplx>() * p.m - cplx(0, 1) * p.m).norm() < 1e-12);
  }

  // pure covector under the symplectic-type Kaehler structure:
  // tangent part of pi_{1,0} xi is (i/2) w^{-1} xi
  BihermData kf = kaehler_fiber(4);
  auto [K1, K2] = gualtieri_map(kf);
  auto [p, q] = projectors(K2);
  CGenVector xi;
  xi.X = CVec::Zero(4);
  xi.xi = CVec::Random(4);
  CGenVector pr = CGenEndo(p.m, 4).apply(xi);
  const CMat wi = kf.omega_I().inverse().cast<cplx>();
  CHECK((pr.X - cplx(0, 0.5) * (wi * xi.xi)).norm() < 1e-13);
}

TEST_CASE("fourfold projectors: resolution, ranks, C+ lift of (1,0) vectors") {
  auto rng = make_rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2;
    BihermData bh = random_fiber(rng, n, trial % 2 == 0);
    auto [J1, J2] = gualtieri_map(bh);
    auto Ps = fourfold_projectors(J1, J2);
    const int m = 4 * n;
    CMat sum = CMat::Zero(m, m);
    for (const auto& P : Ps) sum += P.m;
    CHECK((sum - CMat::Identity(m, m)).norm() < 1e-12);
    for (int a = 0; a < 4; ++a)
      for (int bdx = 0; bdx < 4; ++bdx)
        if (a != bdx) CHECK((Ps[a].m * Ps[bdx].m).norm() < 1e-11);
    for (const auto& P : Ps) CHECK(rank_of(P.m) == doctest::Approx(n));

    // X in T^{1,0}_I lifts into C_+ = graph(b+g) inside L1 cap L2
    std::normal_distribution<double> N(0.0, 1.0);
    Vec v = Vec::NullaryExpr(2 * n, [&](int) { return N(rng); });
    CVec X = v.cast<cplx>() - cplx(0, 1) * (bh.I * v).cast<cplx>();
    CGenVector lift = c_plus_lift(bh, X);
    CVec s = lift.stacked();
    CHECK((Ps[0].m * s - s).norm() < 1e-10 * (1.0 + s.norm()));
  }
}

TEST_CASE("is_11: worked examples") {
  const int d = 4;
  // K = dx^1 wedge dx^2 as a map T -> T*
  Mat Karr = Mat::Zero(d, d);
  Karr(0, 1) = 1.0;
  Karr(1, 0) = -1.0;
  TwoForm K{Mat(Karr.transpose())};

  Mat Ja = Mat::Zero(d, d);  // maps d1 -> d2, d3 -> d4
  Ja(1, 0) = 1.0;
  Ja(0, 1) = -1.0;
  Ja(3, 2) = 1.0;
  Ja(2, 3) = -1.0;
  CHECK(is_11(K, Ja).ok);

  Mat Jb = Mat::Zero(d, d);  // maps d1 -> d3, d2 -> d4
  Jb(2, 0) = 1.0;
  Jb(3, 1) = 1.0;
  Jb(0, 2) = -1.0;
  Jb(1, 3) = -1.0;
  CHECK_FALSE(is_11(K, Jb).ok);

  auto rng = make_rng(21);
  BihermData bh = random_fiber(rng, 2);
  CHECK(is_11(TwoForm(bh.omega_J()), bh.J).ok);
  CHECK(is_11(TwoForm(Mat(Mat::Zero(d, d))), Ja).ok);
}

TEST_CASE("induced_variation: Kaehler and commuting special cases") {
  auto rng = make_rng(22);
  BihermData kf = kaehler_fiber(4);
  TwoForm K = random_11_two_form(rng, kf);
  Variation v = induced_variation(kf, K);
  CHECK((v.omega_I_dot - K.K).norm() < 1e-13);
  CHECK(v.J_dot.norm() < 1e-13);
  CHECK(v.I_dot.norm() < 1e-13);

  // commuting case: block-diagonal parts of the variation.  On the
  // subbundle where I = J, omega_I and omega_J coincide identically, so
  // their variations agree there; where I = -J they are opposite.
  BihermData cf = commuting_fiber();
  Mat I0 = cf.I.topLeftCorner(2, 2);
  Mat Kc = Mat::Zero(4, 4);
  Kc.topLeftCorner(2, 2) = 0.7 * I0;      // K_{++}
  Kc.bottomRightCorner(2, 2) = -0.4 * I0; // K_{--}
  Mat off = Mat::Zero(4, 4);
  off(0, 2) = 0.3;
  off(2, 0) = -0.3;
  Kc += proj11(off, cf.J);
  TwoForm Kcf{Kc};
  REQUIRE(is_11(Kcf, cf.J).ok);
  Variation vc = induced_variation(cf, Kcf);
  CHECK((vc.omega_I_dot.topLeftCorner(2, 2) - Kc.topLeftCorner(2, 2)).norm() < 1e-13);
  CHECK((vc.omega_I_dot.bottomRightCorner(2, 2) - Kc.bottomRightCorner(2, 2)).norm() < 1e-13);
  CHECK((vc.omega_J_dot.topLeftCorner(2, 2) - Kc.topLeftCorner(2, 2)).norm() < 1e-13);
  CHECK((vc.omega_J_dot.bottomRightCorner(2, 2) + Kc.bottomRightCorner(2, 2)).norm() < 1e-13);
  CHECK((vc.g_dot.topLeftCorner(2, 2) -
         I0.transpose() * Kc.topLeftCorner(2, 2)).norm() < 1e-13);
  // b variation is purely off-diagonal
  CHECK(vc.b_dot.topLeftCorner(2, 2).norm() < 1e-13);
  CHECK(vc.b_dot.bottomRightCorner(2, 2).norm() < 1e-13);
  CHECK(vc.J_dot.norm() < 1e-13);
}

TEST_CASE("induced_variation: structure, sigma invariance, finite differences") {
  auto rng = make_rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 2);
    BihermData bh = random_fiber(rng, n, (n == 2) && (trial % 2 == 0));
    TwoForm K = random_11_two_form(rng, bh);
    Variation v = induced_variation(bh, K);
    CHECK((v.g_dot - v.g_dot.transpose()).norm() < 1e-12 * (1 + v.g_dot.norm()));
    CHECK((v.b_dot + v.b_dot.transpose()).norm() < 1e-12 * (1 + v.b_dot.norm()));
    CHECK((v.omega_I_dot + v.omega_I_dot.transpose()).norm() <
          1e-12 * (1 + v.omega_I_dot.norm()));
    CHECK((v.omega_J_dot + v.omega_J_dot.transpose()).norm() <
          1e-12 * (1 + v.omega_J_dot.norm()));
    CHECK((v.omega_I_dot - (v.g_dot * bh.I + bh.g * v.I_dot)).norm() < 1e-12);

    // sigma is invariant: differentiate 1/2 [I,J] g^{-1} by the product rule
    const Mat gi = bh.g.inverse();
    const Mat comm_dot = v.I_dot * bh.J + bh.I * v.J_dot - v.J_dot * bh.I - bh.J * v.I_dot;
    const Mat sigma_dot =
        0.5 * comm_dot * gi - 0.5 * (bh.I * bh.J - bh.J * bh.I) * gi * v.g_dot * gi;
    CHECK(sigma_dot.norm() < 1e-12 * (1.0 + K.K.norm()));
  }

  // centered finite difference of the extraction along an Euler step of the
  // deformed pair; the difference from the closed formulas is O(h^2)
  BihermData bh = random_fiber(rng, 2);
  TwoForm K = random_11_two_form(rng, bh);
  Variation v = induced_variation(bh, K);
  auto [J1, J2] = gualtieri_map(bh);
  GenEndo P1 = phi_k(J1, K), P2 = phi_k(J2, K);
  auto fd = [&](double h) {
    BihermData p = extract_biherm(GenEndo(Mat(J1.m + h * P1.m), J1.d),
                                  GenEndo(Mat(J2.m + h * P2.m), J2.d), 1e-3);
    BihermData m = extract_biherm(GenEndo(Mat(J1.m - h * P1.m), J1.d),
                                  GenEndo(Mat(J2.m - h * P2.m), J2.d), 1e-3);
    double err = 0.0;
    err = std::max(err, ((p.g - m.g) / (2 * h) - v.g_dot).norm());
    err = std::max(err, ((p.b - m.b) / (2 * h) - v.b_dot).norm());
    err = std::max(err, ((p.I - m.I) / (2 * h) - v.I_dot).norm());
    err = std::max(err, ((p.J - m.J) / (2 * h) - v.J_dot).norm());
    return err;
  };
  const double e1 = fd(1e-3), e2 = fd(5e-4);
  CHECK(e1 < 1e-4);
  CHECK(e1 / e2 > 3.0);  // O(h^2) convergence

  // non-(1,1) K is rejected
  Mat bad = Mat::Zero(4, 4);
  bad(0, 2) = 1.0;
  bad(2, 0) = -1.0;
  TwoForm Kbad{Mat(bad - proj11(bad, bh.J) + 1e-3 * proj11(bad, bh.J))};
  if (!is_11(Kbad, bh.J).ok) CHECK_THROWS_AS(induced_variation(bh, Kbad), Error);
}

TEST_CASE("deformation operator: closed-form blocks at b = 0") {
  auto rng = make_rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    BihermData bh = random_fiber(rng, 2, trial % 2 == 0, /*b_scale=*/0.0);
    auto [J1, J2] = gualtieri_map(bh);
    TwoForm K = random_two_form(rng, 4);
    const Mat wIi = bh.omega_I().inverse(), wJi = bh.omega_J().inverse();
    const Mat It = bh.I.transpose(), Jt = bh.J.transpose();

    // Phi_K(J_{1/2}) = 1/4 ( -(wI^{-1} mp wJ^{-1}) K (I pm J), ...)
    for (double s : {+1.0, -1.0}) {
      const GenEndo& J = (s > 0) ? J1 : J2;
      const Mat wi = wIi - s * wJi;
      const Mat ipj = bh.I + s * bh.J;
      const Mat dual = It + s * Jt;
      GenEndo P = phi_k(J, K);
      CHECK((P.A() - 0.25 * (-wi * K.K * ipj)).norm() < 1e-12);
      CHECK((P.beta() - 0.25 * (wi * K.K * wi)).norm() < 1e-12);
      CHECK((P.B() - 0.25 * (4.0 * K.K - dual * K.K * ipj)).norm() < 1e-12);
      CHECK((P.D() - 0.25 * (dual * K.K * wi)).norm() < 1e-12);
    }
  }
}

TEST_CASE("deformation operator: commutator blocks and compatibility") {
  auto rng = make_rng(25);
  auto comm = [](const Mat& A, const Mat& B) { return Mat(A * B - B * A); };
  for (int trial = 0; trial < 20; ++trial) {
    BihermData bh = random_fiber(rng, 2, false, /*b_scale=*/0.0);
    auto [J1, J2] = gualtieri_map(bh);
    TwoForm K = random_two_form(rng, 4);
    const Mat gi = bh.g.inverse();
    const Mat wIi = bh.omega_I().inverse(), wJi = bh.omega_J().inverse();
    const Mat It = bh.I.transpose(), Jt = bh.J.transpose();
    const Mat& k = K.K;

    const Mat C12 = comm(phi_k(J1, K).m, J2.m);
    const Mat C21 = comm(phi_k(J2, K).m, J1.m);

    Mat E12(8, 8), E21(8, 8);
    E12.topLeftCorner(4, 4) = (wIi + wJi) * k + gi * k * (bh.I + bh.J);
    E12.topRightCorner(4, 4) = (wIi - wJi) * k * gi - gi * k * (wIi - wJi);
    E12.bottomLeftCorner(4, 4) = k * (bh.I - bh.J) + (It - Jt) * k;
    E12.bottomRightCorner(4, 4) = (It + Jt) * k * gi - k * (wIi + wJi);
    E21.topLeftCorner(4, 4) = (wIi - wJi) * k + gi * k * (bh.I - bh.J);
    E21.topRightCorner(4, 4) = (wIi + wJi) * k * gi - gi * k * (wIi + wJi);
    E21.bottomLeftCorner(4, 4) = k * (bh.I + bh.J) + (It + Jt) * k;
    E21.bottomRightCorner(4, 4) = (It - Jt) * k * gi - k * (wIi - wJi);

    CHECK((C12 - 0.5 * E12).norm() < 1e-11 * (1.0 + k.norm()));
    CHECK((C21 - 0.5 * E21).norm() < 1e-11 * (1.0 + k.norm()));
  }

  // equality of the two commutators <=> K is (1,1) with respect to J
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    BihermData bh = random_fiber(rng, 2, trial % 2 == 0, 0.4);
    auto [J1, J2] = gualtieri_map(bh);
    TwoForm K11 = random_11_two_form(rng, bh);
    const Mat D1 = comm(phi_k(J1, K11).m, J2.m) - comm(phi_k(J2, K11).m, J1.m);
    if (D1.norm() > 1e-11 * (1.0 + K11.K.norm())) ++failures;
    TwoForm Kr = random_two_form(rng, 4);
    const Mat D2 = comm(phi_k(J1, Kr).m, J2.m) - comm(phi_k(J2, Kr).m, J1.m);
    if (!is_11(Kr, bh.J).ok && D2.norm() < 1e-3 * Kr.K.norm()) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("symplectic data F_pm and Omega") {
  auto rng = make_rng(26);
  // anticommuting fiber: [I, J] invertible, so F_pm and Omega exist
  BihermData bh = random_fiber(rng, 2, true);
  auto Fp = bh.F_plus(), Fm = bh.F_minus(), Om = bh.Omega();
  REQUIRE(Fp.has_value());
  REQUIRE(Fm.has_value());
  REQUIRE(Om.has_value());
  CHECK((*Fp + Fp->transpose()).norm() < 1e-11);
  CHECK((*Fm + Fm->transpose()).norm() < 1e-11);
  CHECK((*Om * bh.sigma() - Mat::Identity(4, 4)).norm() < 1e-11);
  // identity used by the nondegenerate flow bookkeeping: g = -1/2 F_+ (I+J)
  CHECK((bh.g + 0.5 * (*Fp) * (bh.I + bh.J)).norm() < 1e-11);
  CHECK((bh.g + 0.5 * (*Fm) * (bh.I - bh.J)).norm() < 1e-11);

  // Kaehler fiber: [I, J] = 0, accessors signal absence
  BihermData kf = kaehler_fiber(4);
  CHECK_FALSE(kf.F_plus().has_value());
  CHECK_FALSE(kf.Omega().has_value());
}
