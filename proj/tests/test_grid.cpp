#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gk/grid.hpp"

#include <cmath>

using namespace gk;

namespace {

Valence form(int k) {
  Valence v;
  v.p = k;
  v.q = 0;
  v.antisym = k >= 2;
  return v;
}

Valence endo_valence() {
  Valence v;
  v.p = 1;
  v.q = 1;
  return v;
}

double max_err(const TensorField& got, const TensorField& want) {
  TensorField d = got - want;
  return d.max_abs();
}

}  // namespace

TEST_CASE("grid indexing: strides, coordinates and point round trip") {
  Grid g(2, 8);  // T^4, 8 points per axis
  CHECK(g.dim() == 4);
  CHECK(g.npts() == 4096);
  CHECK(g.stride(3) == 1);
  CHECK(g.stride(2) == 8);
  CHECK(g.stride(1) == 64);
  CHECK(g.stride(0) == 512);

  // point 0 is the origin, advancing along stride(a) advances coordinate a
  for (int a = 0; a < 4; ++a) {
    CHECK(g.coord(0, a) == doctest::Approx(0.0));
    CHECK(g.coord(g.stride(a), a) == doctest::Approx(2.0 * M_PI / 8.0));
  }

  // point_of agrees with coord on a scattering of points
  for (std::size_t pt : {std::size_t(0), std::size_t(17), std::size_t(513), std::size_t(4095)}) {
    Vec x = point_of(g, pt);
    for (int a = 0; a < 4; ++a) CHECK(x(a) == doctest::Approx(g.coord(pt, a)));
  }

  CHECK_THROWS_AS(Grid(1, 7), Error);   // odd N
  CHECK_THROWS_AS(Grid(1, 4), Error);   // too coarse
  CHECK_THROWS_AS(Grid(5, 8), Error);   // dimension above the supported cap
}

TEST_CASE("tensor field storage: components, arithmetic, norms") {
  Grid g(1, 8);
  TensorField f(g, form(2));
  CHECK(f.ncomp() == 4);
  CHECK(f.data.size() == 4 * 64);
  CHECK(f.cindex({1, 0}) == 2);
  CHECK(f.cindex({0, 1}) == 1);

  // fill component (0,1) with ones; frobenius is the grid-mean rms
  for (std::size_t p = 0; p < f.npts(); ++p) f.comp(f.cindex({0, 1}))[p] = 1.0;
  CHECK(f.max_abs() == doctest::Approx(1.0));
  CHECK(f.frobenius() == doctest::Approx(1.0));

  TensorField h = f + f;
  CHECK(h.max_abs() == doctest::Approx(2.0));
  h -= f;
  CHECK(max_err(h, f) == doctest::Approx(0.0));
  h *= -3.0;
  CHECK(h.max_abs() == doctest::Approx(3.0));
  CHECK((2.0 * f).frobenius() == doctest::Approx(2.0));

  // mismatched shapes are rejected
  TensorField w(g, form(1));
  CHECK_THROWS_AS(w += f, Error);
}

TEST_CASE("samplers: scalar, general, constant") {
  Grid g(1, 16);
  TensorField u = scalar_field(g, [](const Vec& x) { return std::sin(x(0)) * std::cos(x(1)); });
  CHECK(u.ncomp() == 1);
  // spot check one interior point
  std::size_t pt = 3 * g.stride(0) + 5;
  CHECK(u.comp(0)[pt] ==
        doctest::Approx(std::sin(g.coord(pt, 0)) * std::cos(g.coord(pt, 1))));

  // general sampler: a 1-form with components (cos x2, -cos x1)
  TensorField a = sample_field(g, form(1), [](const Vec& x, const std::vector<int>& idx) {
    return idx[0] == 0 ? std::cos(x(1)) : -std::cos(x(0));
  });
  CHECK(a.comp(0)[pt] == doctest::Approx(std::cos(g.coord(pt, 1))));
  CHECK(a.comp(1)[pt] == doctest::Approx(-std::cos(g.coord(pt, 0))));

  Mat m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  TensorField c = constant_field(g, endo_valence(), m);
  CHECK((at_point(c, pt) - m).norm() == doctest::Approx(0.0));

  // set_point / vec_at_point round trips
  set_point(c, pt, 2.0 * m);
  CHECK((at_point(c, pt) - 2.0 * m).norm() == doctest::Approx(0.0));
  CHECK(vec_at_point(a, pt)(1) == doctest::Approx(-std::cos(g.coord(pt, 0))));
}

TEST_CASE("spectral derivative is exact on band-limited fields") {
  Grid g(2, 8);
  // u = sin x1 cos x3 + 0.5 sin(2 x2) x-independent checks on all axes
  TensorField u = scalar_field(g, [](const Vec& x) {
    return std::sin(x(0)) * std::cos(x(2)) + 0.5 * std::sin(2.0 * x(1));
  });

  TensorField d0 = partial(u, 0);
  TensorField want0 = scalar_field(g, [](const Vec& x) { return std::cos(x(0)) * std::cos(x(2)); });
  CHECK(max_err(d0, want0) < 1e-13);

  TensorField d1 = partial(u, 1);
  TensorField want1 = scalar_field(g, [](const Vec& x) { return std::cos(2.0 * x(1)); });
  CHECK(max_err(d1, want1) < 1e-13);

  TensorField d2 = partial(u, 2);
  TensorField want2 =
      scalar_field(g, [](const Vec& x) { return -std::sin(x(0)) * std::sin(x(2)); });
  CHECK(max_err(d2, want2) < 1e-13);

  TensorField d3 = partial(u, 3);
  CHECK(d3.max_abs() < 1e-13);

  // mixed partials commute
  TensorField d02 = partial(d0, 2);
  TensorField d20 = partial(d2, 0);
  CHECK(max_err(d02, d20) < 1e-13);

  // derivative acts component by component on higher-rank fields
  TensorField a = sample_field(g, form(1), [](const Vec& x, const std::vector<int>& idx) {
    return idx[0] == 2 ? std::sin(x(3)) : 0.0;
  });
  TensorField da = partial(a, 3);
  for (std::size_t p = 0; p < da.npts(); ++p) {
    CHECK(da.comp(2)[p] == doctest::Approx(std::cos(g.coord(p, 3))).epsilon(1e-12));
  }
  CHECK(partial(a, 0).max_abs() < 1e-13);
}

TEST_CASE("spectral accuracy: error collapses under refinement") {
  // u = exp(sin x1) is analytic but not band-limited; the derivative error
  // should drop by many orders of magnitude from N=16 to N=32.
  auto u_fn = [](const Vec& x) { return std::exp(std::sin(x(0))); };
  auto du_fn = [](const Vec& x) { return std::cos(x(0)) * std::exp(std::sin(x(0))); };

  double err[2];
  int Ns[2] = {16, 32};
  for (int k = 0; k < 2; ++k) {
    Grid g(1, Ns[k]);
    TensorField u = scalar_field(g, u_fn);
    TensorField want = scalar_field(g, du_fn);
    err[k] = max_err(partial(u, 0), want);
  }
  CHECK(err[0] < 1e-4);
  CHECK(err[1] < 1e-12);
  CHECK(err[1] < 1e-6 * err[0]);
}

TEST_CASE("Nyquist mode is annihilated by the derivative") {
  // cos(N/2 x) is sampled as (-1)^j; its sine partner vanishes on the grid, so
  // the only consistent spectral derivative is zero.
  Grid g(1, 8);
  TensorField u = scalar_field(g, [](const Vec& x) { return std::cos(4.0 * x(0)); });
  CHECK(u.max_abs() == doctest::Approx(1.0));
  CHECK(partial(u, 0).max_abs() < 1e-13);
}

TEST_CASE("two-thirds low pass: keeps low modes, kills high ones, idempotent") {
  Grid g(1, 12);  // keep |k| <= 4
  TensorField lo = scalar_field(g, [](const Vec& x) { return std::sin(3.0 * x(0)) + std::cos(4.0 * x(1)); });
  TensorField hi = scalar_field(g, [](const Vec& x) { return std::sin(5.0 * x(0)) * std::cos(x(1)); });

  CHECK(max_err(lowpass_two_thirds(lo), lo) < 1e-13);
  CHECK(lowpass_two_thirds(hi).max_abs() < 1e-13);

  TensorField mix = lo + hi;
  TensorField once = lowpass_two_thirds(mix);
  CHECK(max_err(once, lo) < 1e-13);
  CHECK(max_err(lowpass_two_thirds(once), once) < 1e-13);
}

TEST_CASE("transform round trip leaves no imaginary residue") {
  Grid g(2, 8);
  TensorField u = sample_field(g, form(1), [](const Vec& x, const std::vector<int>& idx) {
    return std::sin(x(0) + 2.0 * x(1)) * std::cos(x(2)) + 0.3 * idx[0];
  });
  CHECK(spectral_roundtrip_residue(u) < 1e-13);
}

TEST_CASE("metric L2 inner product: flat volumes and orthogonality") {
  Grid g(2, 8);
  const double vol = std::pow(2.0 * M_PI, 4);
  TensorField gm = constant_field(g, Valence{2, 0, false}, Mat::Identity(4, 4));

  // 1-forms dx^a
  auto dx = [&](int a) {
    return sample_field(g, form(1), [a](const Vec&, const std::vector<int>& idx) {
      return idx[0] == a ? 1.0 : 0.0;
    });
  };
  CHECK(l2_inner(dx(0), dx(0), gm) == doctest::Approx(vol));
  CHECK(l2_inner(dx(0), dx(1), gm) == doctest::Approx(0.0).epsilon(1e-12));

  // dx^1 ^ dx^2 as a dense antisymmetric array
  TensorField w12 = sample_field(g, form(2), [](const Vec&, const std::vector<int>& idx) {
    if (idx[0] == 0 && idx[1] == 1) return 1.0;
    if (idx[0] == 1 && idx[1] == 0) return -1.0;
    return 0.0;
  });
  CHECK(l2_inner(w12, w12, gm) == doctest::Approx(vol));

  // mean of a scalar product: <sin x1, sin x1> = vol / 2
  TensorField s = scalar_field(g, [](const Vec& x) { return std::sin(x(0)); });
  CHECK(l2_inner(s, s, gm) == doctest::Approx(0.5 * vol));

  // conformal metric c g: <dx,dx> = c^{-1} c^{d/2} vol = c dot vol for d = 4
  const double c = 1.7;
  TensorField gm_c = constant_field(g, Valence{2, 0, false}, c * Mat::Identity(4, 4));
  CHECK(l2_inner(dx(0), dx(0), gm_c) == doctest::Approx(c * vol));
}
