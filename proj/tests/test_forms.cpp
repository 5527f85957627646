#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gk/forms.hpp"

#include <cmath>

using namespace gk;

namespace {

double max_err(const TensorField& got, const TensorField& want) {
  TensorField d = got - want;
  return d.max_abs();
}

Mat standard_acs(int d) {
  Mat I0 = Mat::Zero(d, d);
  for (int k = 0; k + 1 < d; k += 2) {
    I0(k, k + 1) = -1.0;
    I0(k + 1, k) = 1.0;
  }
  return I0;
}

}  // namespace

TEST_CASE("ext_d on functions and 1-forms matches hand-computed derivatives") {
  Grid g(2, 12);
  TensorField u = scalar_field(g, [](const Vec& x) { return std::sin(x(0)) * std::cos(x(1)); });
  TensorField du = ext_d(u);
  CHECK(du.val.p == 1);
  TensorField want = sample_field(g, form_valence(1), [](const Vec& x, const std::vector<int>& i) {
    if (i[0] == 0) return std::cos(x(0)) * std::cos(x(1));
    if (i[0] == 1) return -std::sin(x(0)) * std::sin(x(1));
    return 0.0;
  });
  CHECK(max_err(du, want) < 1e-12);

  // a = sin(x2) dx0:  da = -cos(x2) dx0 ^ dx2  (array comps (0,2) = -cos, (2,0) = +cos)
  TensorField a = sample_field(g, form_valence(1), [](const Vec& x, const std::vector<int>& i) {
    return i[0] == 0 ? std::sin(x(2)) : 0.0;
  });
  TensorField da = ext_d(a);
  TensorField want2 = sample_field(g, form_valence(2), [](const Vec& x, const std::vector<int>& i) {
    if (i[0] == 0 && i[1] == 2) return -std::cos(x(2));
    if (i[0] == 2 && i[1] == 0) return std::cos(x(2));
    return 0.0;
  });
  CHECK(max_err(da, want2) < 1e-12);
}

TEST_CASE("d^2 = 0 and output antisymmetry") {
  Grid g(2, 12);
  TensorField u = scalar_field(g, [](const Vec& x) {
    return std::sin(x(0) + x(3)) + std::cos(x(1)) * std::sin(x(2));
  });
  CHECK(ext_d(ext_d(u)).max_abs() < 1e-12);

  TensorField a = sample_field(g, form_valence(1), [](const Vec& x, const std::vector<int>& i) {
    return std::sin(x(i[0]) + 0.5 * x((i[0] + 1) % 4));
  });
  TensorField da = ext_d(a);
  // antisymmetry of the dense array
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      TensorField diff(g, Valence{});
      const double* pq = da.comp(da.cindex({p, q}));
      const double* qp = da.comp(da.cindex({q, p}));
      double m = 0.0;
      for (std::size_t t = 0; t < da.npts(); ++t) m = std::max(m, std::abs(pq[t] + qp[t]));
      CHECK(m < 1e-12);
    }
  // d(da) is a 3-form with vanishing closedness residual as well
  CHECK(closedness_residual(ext_d(da)) < 1e-12);
}

TEST_CASE("2-form exterior derivative and streamed closedness residual") {
  Grid g(2, 12);
  // w = sin(x2) dx0 ^ dx1  =>  dw = cos(x2) dx2 ^ dx0 ^ dx1
  TensorField w = sample_field(g, form_valence(2), [](const Vec& x, const std::vector<int>& i) {
    if (i[0] == 0 && i[1] == 1) return std::sin(x(2));
    if (i[0] == 1 && i[1] == 0) return -std::sin(x(2));
    return 0.0;
  });
  TensorField dw = ext_d(w);
  CHECK(dw.val.p == 3);

  TensorField expect_012(g, Valence{});
  const double* c012 = dw.comp(dw.cindex({0, 1, 2}));
  double m = 0.0;
  for (std::size_t t = 0; t < dw.npts(); ++t)
    m = std::max(m, std::abs(c012[t] - std::cos(g.coord(t, 2))));
  CHECK(m < 1e-12);
  // an even permutation carries the same value, an odd one the opposite sign
  const double* c201 = dw.comp(dw.cindex({2, 0, 1}));
  const double* c102 = dw.comp(dw.cindex({1, 0, 2}));
  m = 0.0;
  for (std::size_t t = 0; t < dw.npts(); ++t) {
    m = std::max(m, std::abs(c201[t] - c012[t]));
    m = std::max(m, std::abs(c102[t] + c012[t]));
  }
  CHECK(m < 1e-12);

  // dw is exact, hence closed: the streamed residual agrees with d^2 = 0
  CHECK(closedness_residual(dw) < 1e-12);

  // non-closed 3-form with a known dense norm:
  // H = sin(x0) dx1^dx2^dx3 => dH = cos(x0) dx0^..^dx3,
  // frobenius = sqrt(24 * mean(cos^2)) = sqrt(12)
  TensorField H = sample_field(g, form_valence(3), [](const Vec& x, const std::vector<int>& i) {
    const int perm[3] = {i[0], i[1], i[2]};
    // sign of the permutation of (1,2,3), zero if any index repeats or is 0
    int idx[3] = {perm[0], perm[1], perm[2]};
    for (int t = 0; t < 3; ++t)
      if (idx[t] == 0) return 0.0;
    int sign = 1;
    for (int s = 0; s < 3; ++s)
      for (int t = s + 1; t < 3; ++t) {
        if (idx[s] == idx[t]) return 0.0;
        if (idx[s] > idx[t]) sign = -sign;
      }
    return sign * std::sin(x(0));
  });
  CHECK(closedness_residual(H) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-12));
}

TEST_CASE("pullback of all slots through an endomorphism") {
  Grid g(1, 12);
  TensorField I = constant_field(g, endo_valence(), standard_acs(2));

  // dx0 o I = -dx1 (array convention: (A*f)_a = f_c I^c_a)
  TensorField dx0 = sample_field(g, form_valence(1), [](const Vec&, const std::vector<int>& i) {
    return i[0] == 0 ? 1.0 : 0.0;
  });
  TensorField pulled = pullback_slots(dx0, I);
  TensorField want = sample_field(g, form_valence(1), [](const Vec&, const std::vector<int>& i) {
    return i[0] == 1 ? -1.0 : 0.0;
  });
  CHECK(max_err(pulled, want) < 1e-14);

  // 2-form: w(I., I.) for w = dx0 ^ dx1 is w again (I is a rotation)
  TensorField w = sample_field(g, form_valence(2), [](const Vec&, const std::vector<int>& i) {
    if (i[0] == 0 && i[1] == 1) return 1.0;
    if (i[0] == 1 && i[1] == 0) return -1.0;
    return 0.0;
  });
  CHECK(max_err(pullback_slots(w, I), w) < 1e-14);

  // pointwise-varying A: scaling by u(x) multiplies a k-form by u^k
  TensorField A = sample_field(g, endo_valence(), [](const Vec& x, const std::vector<int>& i) {
    return i[0] == i[1] ? 2.0 + std::sin(x(0)) : 0.0;
  });
  TensorField wA = pullback_slots(w, A);
  const double* c01 = wA.comp(wA.cindex({0, 1}));
  double m = 0.0;
  for (std::size_t t = 0; t < wA.npts(); ++t) {
    const double s = 2.0 + std::sin(g.coord(t, 0));
    m = std::max(m, std::abs(c01[t] - s * s));
  }
  CHECK(m < 1e-13);
}

TEST_CASE("dc and did: flat-torus potential operator") {
  Grid g(1, 16);
  Mat I0 = standard_acs(2);
  TensorField I = constant_field(g, endo_valence(), I0);

  TensorField u = scalar_field(g, [](const Vec& x) { return std::sin(x(0)) * std::cos(x(1)); });

  // dc u = -du o I = -u_{,1} dx0 + u_{,0} dx1
  TensorField dcu = dc(u, I);
  TensorField want = sample_field(g, form_valence(1), [](const Vec& x, const std::vector<int>& i) {
    if (i[0] == 0) return std::sin(x(0)) * std::sin(x(1));
    return std::cos(x(0)) * std::cos(x(1));
  });
  CHECK(max_err(dcu, want) < 1e-12);

  // did u = d(du o I) = -(laplacian u) dx0 ^ dx1; here laplacian u = -2u
  TensorField K = did(u, I);
  const double* c01 = K.comp(K.cindex({0, 1}));
  const double* c10 = K.comp(K.cindex({1, 0}));
  const double* c00 = K.comp(K.cindex({0, 0}));
  double m = 0.0;
  for (std::size_t t = 0; t < K.npts(); ++t) {
    const double uu = std::sin(g.coord(t, 0)) * std::cos(g.coord(t, 1));
    m = std::max(m, std::abs(c01[t] - 2.0 * uu));
    m = std::max(m, std::abs(c10[t] + 2.0 * uu));
    m = std::max(m, std::abs(c00[t]));
  }
  CHECK(m < 1e-12);

  // did = -d(dc): exactness of the potential form
  TensorField ddc = ext_d(dcu);
  ddc *= -1.0;
  CHECK(max_err(K, ddc) < 1e-12);
  CHECK(ext_d(K).max_abs() < 1e-12);
}

TEST_CASE("interior product contracts the first slot") {
  Grid g(1, 12);
  TensorField w = sample_field(g, form_valence(2), [](const Vec& x, const std::vector<int>& i) {
    if (i[0] == 0 && i[1] == 1) return std::cos(x(1));
    if (i[0] == 1 && i[1] == 0) return -std::cos(x(1));
    return 0.0;
  });
  TensorField X = sample_field(g, vector_valence(), [](const Vec& x, const std::vector<int>& i) {
    return i[0] == 0 ? std::sin(x(0)) : 0.0;
  });
  TensorField iw = interior(X, w);
  CHECK(iw.val.p == 1);
  const double* c1 = iw.comp(1);
  const double* c0 = iw.comp(0);
  double m = 0.0;
  for (std::size_t t = 0; t < iw.npts(); ++t) {
    m = std::max(m, std::abs(c1[t] - std::sin(g.coord(t, 0)) * std::cos(g.coord(t, 1))));
    m = std::max(m, std::abs(c0[t]));
  }
  CHECK(m < 1e-13);
}

TEST_CASE("sharp raises an index with a varying metric") {
  Grid g(1, 12);
  // g = e^{2 phi} Id with phi = 0.3 sin x0: sharp(dx0) = e^{-2 phi} e0
  TensorField gm = sample_field(g, metric_valence(), [](const Vec& x, const std::vector<int>& i) {
    return i[0] == i[1] ? std::exp(0.6 * std::sin(x(0))) : 0.0;
  });
  TensorField a = sample_field(g, form_valence(1), [](const Vec&, const std::vector<int>& i) {
    return i[0] == 0 ? 1.0 : 0.0;
  });
  TensorField X = sharp(a, gm);
  CHECK(X.val.q == 1);
  double m = 0.0;
  for (std::size_t t = 0; t < X.npts(); ++t) {
    const double want = std::exp(-0.6 * std::sin(g.coord(t, 0)));
    m = std::max(m, std::abs(X.comp(0)[t] - want));
    m = std::max(m, std::abs(X.comp(1)[t]));
  }
  CHECK(m < 1e-12);
}

TEST_CASE("lie derivative: scalars, brackets, metrics") {
  Grid g(1, 16);
  TensorField X = sample_field(g, vector_valence(), [](const Vec& x, const std::vector<int>& i) {
    return i[0] == 0 ? std::sin(x(1)) : 0.0;
  });

  // scalar advection
  TensorField u = scalar_field(g, [](const Vec& x) { return std::cos(x(0)); });
  TensorField Lu = lie(X, u);
  double m = 0.0;
  for (std::size_t t = 0; t < Lu.npts(); ++t) {
    const double want = -std::sin(g.coord(t, 1)) * std::sin(g.coord(t, 0));
    m = std::max(m, std::abs(Lu.comp(0)[t] - want));
  }
  CHECK(m < 1e-12);

  // vector field: L_X Y = [X, Y]
  TensorField Y = sample_field(g, vector_valence(), [](const Vec& x, const std::vector<int>& i) {
    return i[0] == 1 ? std::cos(x(0)) : 0.0;
  });
  TensorField LY = lie(X, Y);
  // [X,Y]^c = X^a d_a Y^c - Y^a d_a X^c
  //        = -sin(x1) sin(x0) e1 - cos(x0) cos(x1) e0
  m = 0.0;
  for (std::size_t t = 0; t < LY.npts(); ++t) {
    const double x0 = g.coord(t, 0), x1 = g.coord(t, 1);
    m = std::max(m, std::abs(LY.comp(0)[t] + std::cos(x0) * std::cos(x1)));
    m = std::max(m, std::abs(LY.comp(1)[t] + std::sin(x1) * std::sin(x0)));
  }
  CHECK(m < 1e-12);

  // flat metric: constant fields are Killing, the shear above is not
  TensorField gm = constant_field(g, metric_valence(), Mat::Identity(2, 2));
  TensorField Xc = sample_field(g, vector_valence(), [](const Vec&, const std::vector<int>&) { return 1.0; });
  CHECK(lie(Xc, gm).max_abs() < 1e-13);
  TensorField Lg = lie(X, gm);
  // (L_X g)_{01} = d_1 X^0 = cos(x1), diagonal terms vanish
  m = 0.0;
  for (std::size_t t = 0; t < Lg.npts(); ++t) {
    const double want = std::cos(g.coord(t, 1));
    m = std::max(m, std::abs(Lg.comp(Lg.cindex({0, 1}))[t] - want));
    m = std::max(m, std::abs(Lg.comp(Lg.cindex({1, 0}))[t] - want));
    m = std::max(m, std::abs(Lg.comp(Lg.cindex({0, 0}))[t]));
    m = std::max(m, std::abs(Lg.comp(Lg.cindex({1, 1}))[t]));
  }
  CHECK(m < 1e-12);
}

TEST_CASE("lie derivative: Cartan formula and Leibniz rule on endomorphisms") {
  Grid g(2, 12);
  TensorField X = sample_field(g, vector_valence(), [](const Vec& x, const std::vector<int>& i) {
    switch (i[0]) {
      case 0: return std::sin(x(1));
      case 1: return std::cos(x(2));
      case 2: return 0.5 * std::sin(x(3));
      default: return 0.25 * std::cos(x(0));
    }
  });

  // Cartan on 1-forms: L_X a = i_X da + d(i_X a)
  TensorField a = sample_field(g, form_valence(1), [](const Vec& x, const std::vector<int>& i) {
    return std::sin(x(i[0])) + 0.3 * std::cos(x((i[0] + 2) % 4));
  });
  TensorField lhs = lie(X, a);
  TensorField rhs = interior(X, ext_d(a)) + ext_d(interior(X, a));
  CHECK(max_err(lhs, rhs) < 1e-12);

  // Cartan on 2-forms
  TensorField w = sample_field(g, form_valence(2), [](const Vec& x, const std::vector<int>& i) {
    if (i[0] == i[1]) return 0.0;
    const double v = std::sin(x(i[0]) + x(i[1]));
    return i[0] < i[1] ? v : -v;
  });
  CHECK(max_err(lie(X, w), interior(X, ext_d(w)) + ext_d(interior(X, w))) < 1e-12);

  // Leibniz on endomorphisms: L_X(A Y) = (L_X A) Y + A (L_X Y), with A Y the
  // pointwise matrix action
  TensorField A = sample_field(g, endo_valence(), [](const Vec& x, const std::vector<int>& i) {
    return 0.4 * std::sin(x(i[0]) - x(i[1])) + (i[0] == i[1] ? 1.0 : 0.0);
  });
  TensorField Y = sample_field(g, vector_valence(), [](const Vec& x, const std::vector<int>& i) {
    return std::cos(x((i[0] + 1) % 4));
  });
  auto apply = [&](const TensorField& E, const TensorField& V) {
    TensorField out(g, vector_valence());
    for (std::size_t t = 0; t < out.npts(); ++t) {
      const Vec v = at_point(E, t) * vec_at_point(V, t);
      for (int c = 0; c < 4; ++c) out.comp(static_cast<std::size_t>(c))[t] = v(c);
    }
    return out;
  };
  TensorField lhs2 = lie(X, apply(A, Y));
  TensorField rhs2 = apply(lie(X, A), Y) + apply(A, lie(X, Y));
  CHECK(max_err(lhs2, rhs2) < 1e-11);
}
