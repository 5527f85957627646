#include "gk/genfield.hpp"

#include <cmath>

namespace gk {
namespace {

void muladd(double* dst, const double* a, const double* b, std::size_t n,
            double s = 1.0) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += s * a[i] * b[i];
}

GenVectorField& add_scaled(GenVectorField& a, const GenVectorField& b, double s) {
  a.X += s * b.X;
  a.xi += s * b.xi;
  return a;
}

// pi_s v = (v + s i J v) / 2 on a complexified section (J real):
// s = -1 gives pi_{1,0}, s = +1 gives pi_{0,1}.
CGenVectorField project(const GenEndoField& J, const CGenVectorField& v,
                        double s) {
  const CGenVectorField Jv = apply_endo(J, v);
  CGenVectorField out(J.grid());
  out.re.X = 0.5 * (v.re.X - s * Jv.im.X);
  out.re.xi = 0.5 * (v.re.xi - s * Jv.im.xi);
  out.im.X = 0.5 * (v.im.X + s * Jv.re.X);
  out.im.xi = 0.5 * (v.im.xi + s * Jv.re.xi);
  return out;
}

}  // namespace

GenEndo endo_at(const GenEndoField& J, std::size_t pt) {
  return GenEndo::from_blocks(at_point(J.A, pt), at_point(J.beta, pt),
                              at_point(J.B, pt), at_point(J.D, pt));
}

void set_endo(GenEndoField& J, std::size_t pt, const GenEndo& m) {
  const int d = J.grid().dim();
  require(m.d == d, "set_endo", "fiber dimension mismatch");
  set_point(J.A, pt, m.m.block(0, 0, d, d));
  set_point(J.beta, pt, m.m.block(0, d, d, d));
  set_point(J.B, pt, m.m.block(d, 0, d, d));
  set_point(J.D, pt, m.m.block(d, d, d, d));
}

GenEndoField constant_endo_field(const Grid& g, const GenEndo& m) {
  const int d = g.dim();
  require(m.d == d, "constant_endo_field", "fiber dimension mismatch");
  GenEndoField J(g);
  J.A = constant_field(g, endo_valence(), m.m.block(0, 0, d, d));
  J.beta = constant_field(g, endo_valence(), m.m.block(0, d, d, d));
  J.B = constant_field(g, endo_valence(), m.m.block(d, 0, d, d));
  J.D = constant_field(g, endo_valence(), m.m.block(d, d, d, d));
  return J;
}

GenVectorField apply_endo(const GenEndoField& J, const GenVectorField& v) {
  const Grid& g = J.grid();
  require(v.X.grid == g, "apply_endo", "grid mismatch");
  const std::size_t P = g.npts();
  const int d = g.dim();
  GenVectorField out(g);
  for (int a = 0; a < d; ++a) {
    double* oX = out.X.comp(a);
    double* oxi = out.xi.comp(a);
    for (int b = 0; b < d; ++b) {
      const std::size_t ab = J.A.cindex({a, b});
      muladd(oX, J.A.comp(ab), v.X.comp(b), P);
      muladd(oX, J.beta.comp(ab), v.xi.comp(b), P);
      muladd(oxi, J.B.comp(ab), v.X.comp(b), P);
      muladd(oxi, J.D.comp(ab), v.xi.comp(b), P);
    }
  }
  return out;
}

CGenVectorField apply_endo(const GenEndoField& J, const CGenVectorField& v) {
  CGenVectorField out;
  out.re = apply_endo(J, v.re);
  out.im = apply_endo(J, v.im);
  return out;
}

GenVectorField b_shear(const TensorField& K, const GenVectorField& v) {
  const Grid& g = v.X.grid;
  require(K.grid == g && K.val.p == 2 && K.val.q == 0, "b_shear",
          "K must be a 2-form on the section's grid");
  const std::size_t P = g.npts();
  const int d = g.dim();
  GenVectorField out = v;
  for (int a = 0; a < d; ++a) {
    double* oxi = out.xi.comp(a);
    for (int b = 0; b < d; ++b)  // xi_a += K(e_b, e_a) X^b
      muladd(oxi, K.comp(K.cindex({b, a})), v.X.comp(b), P);
  }
  return out;
}

GenVectorField frame_section(const Grid& g, int k) {
  const int d = g.dim();
  require(k >= 0 && k < 2 * d, "frame_section", "frame index out of range");
  GenVectorField v(g);
  double* plane = k < d ? v.X.comp(k) : v.xi.comp(k - d);
  for (std::size_t i = 0; i < g.npts(); ++i) plane[i] = 1.0;
  return v;
}

double max_abs(const GenVectorField& v) {
  return std::max(v.X.max_abs(), v.xi.max_abs());
}

double max_abs(const CGenVectorField& v) {
  double worst = 0.0;
  auto scan = [&](const TensorField& re, const TensorField& im) {
    for (std::size_t c = 0; c < re.ncomp(); ++c) {
      const double* r = re.comp(c);
      const double* i = im.comp(c);
      for (std::size_t p = 0; p < re.npts(); ++p)
        worst = std::max(worst, std::hypot(r[p], i[p]));
    }
  };
  scan(v.re.X, v.im.X);
  scan(v.re.xi, v.im.xi);
  return worst;
}

CGenVectorField operator-(const CGenVectorField& a, const CGenVectorField& b) {
  CGenVectorField out;
  out.re.X = a.re.X - b.re.X;
  out.re.xi = a.re.xi - b.re.xi;
  out.im.X = a.im.X - b.im.X;
  out.im.xi = a.im.xi - b.im.xi;
  return out;
}

GenVectorField courant(const GenVectorField& v, const GenVectorField& w,
                       const TensorField* H, double* dh_residual) {
  const Grid& g = v.X.grid;
  require(w.X.grid == g, "courant", "grid mismatch");
  const std::size_t P = g.npts();
  const int d = g.dim();

  GenVectorField out(g);
  out.X = lie(v.X, w.X);              // [X, Y]
  out.xi = lie(v.X, w.xi);            // L_X eta
  out.xi -= lie(w.X, v.xi);           // - L_Y xi

  TensorField s(g, Valence{});        // xi(Y) - eta(X)
  double* sp = s.comp(0);
  for (int a = 0; a < d; ++a) {
    muladd(sp, v.xi.comp(a), w.X.comp(a), P);
    muladd(sp, w.xi.comp(a), v.X.comp(a), P, -1.0);
  }
  out.xi += 0.5 * ext_d(s);

  if (H != nullptr) {
    require(H->grid == g && H->val.p == 3 && H->val.antisym, "courant",
            "twist must be a 3-form");
    out.xi += interior(w.X, interior(v.X, *H));  // i_Y i_X H
    if (dh_residual != nullptr) *dh_residual = closedness_residual(*H);
  } else if (dh_residual != nullptr) {
    *dh_residual = 0.0;
  }
  return out;
}

CGenVectorField courant(const CGenVectorField& v, const CGenVectorField& w,
                        const TensorField* H) {
  CGenVectorField out;
  out.re = courant(v.re, w.re, H);
  add_scaled(out.re, courant(v.im, w.im, H), -1.0);
  out.im = courant(v.im, w.re, H);
  add_scaled(out.im, courant(v.re, w.im, H), 1.0);
  return out;
}

CGenVectorField nijenhuis_pair(const GenEndoField& J, const TensorField* H,
                               const CGenVectorField& x, const CGenVectorField& y) {
  const CGenVectorField u = project(J, x, -1.0);  // pi_{1,0} x
  const CGenVectorField v = project(J, y, -1.0);  // pi_{1,0} y
  const CGenVectorField w = courant(u, v, H);
  return project(J, w, 1.0);                      // pi_{0,1} w
}

double nijenhuis_norm(const GenEndoField& J, const TensorField* H) {
  const Grid& g = J.grid();
  const std::size_t P = g.npts();
  const int d = g.dim();
  const int D = 2 * d;

  // First derivatives of the four blocks along every axis.
  std::vector<GenEndoField> dJ;
  dJ.reserve(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    GenEndoField dc(g);
    dc.A = partial(J.A, c);
    dc.beta = partial(J.beta, c);
    dc.B = partial(J.B, c);
    dc.D = partial(J.D, c);
    dJ.push_back(std::move(dc));
  }
  if (H != nullptr)
    require(H->grid == g && H->val.p == 3 && H->val.antisym, "nijenhuis_norm",
            "twist must be a 3-form");

  double worst = 0.0;
  std::vector<CVec> du(static_cast<std::size_t>(d)), dv(static_cast<std::size_t>(d));
  for (std::size_t pt = 0; pt < P; ++pt) {
    const Mat Jm = endo_at(J, pt).m;
    std::vector<Mat> dJm;
    dJm.reserve(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) dJm.push_back(endo_at(dJ[static_cast<std::size_t>(c)], pt).m);
    std::vector<Mat> Hs;  // Hs[b](a, c) = H(e_a, e_c, e_b)
    if (H != nullptr) {
      Hs.assign(static_cast<std::size_t>(d), Mat::Zero(d, d));
      for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a)
          for (int c = 0; c < d; ++c)
            Hs[static_cast<std::size_t>(b)](a, c) = H->comp(H->cindex({a, c, b}))[pt];
    }

    for (int k = 0; k < D; ++k) {
      // u = pi_{1,0} e_k = (e_k - i J e_k)/2; position dependence only in J.
      CVec u = CVec::Zero(D);
      u(k) = cplx(0.5, 0.0);
      u -= cplx(0.0, 0.5) * Jm.col(k).cast<cplx>();
      for (int c = 0; c < d; ++c)
        du[static_cast<std::size_t>(c)] =
            (-cplx(0.0, 0.5)) * dJm[static_cast<std::size_t>(c)].col(k).cast<cplx>();

      for (int l = k + 1; l < D; ++l) {
        CVec v = CVec::Zero(D);
        v(l) = cplx(0.5, 0.0);
        v -= cplx(0.0, 0.5) * Jm.col(l).cast<cplx>();
        for (int c = 0; c < d; ++c)
          dv[static_cast<std::size_t>(c)] =
              (-cplx(0.0, 0.5)) * dJm[static_cast<std::size_t>(c)].col(l).cast<cplx>();

        CVec w = CVec::Zero(D);
        for (int a = 0; a < d; ++a) {
          cplx xa(0.0, 0.0), tb(0.0, 0.0);
          for (int c = 0; c < d; ++c) {
            const CVec& duc = du[static_cast<std::size_t>(c)];
            const CVec& dvc = dv[static_cast<std::size_t>(c)];
            // [X, Y]^a
            xa += u(c) * dvc(a) - v(c) * duc(a);
            // (L_X eta - L_Y xi)_a, derivative-of-coefficients part
            tb += u(c) * dvc(d + a) - v(c) * duc(d + a);
          }
          const CVec& dua = du[static_cast<std::size_t>(a)];
          const CVec& dva = dv[static_cast<std::size_t>(a)];
          for (int c = 0; c < d; ++c) {
            // (L_X eta)_a += (d_a X^c) eta_c, and -(L_Y xi)_a -= (d_a Y^c) xi_c
            tb += dua(c) * v(d + c) - dva(c) * u(d + c);
            // + 1/2 d(xi(Y) - eta(X))_a
            tb += 0.5 * (dua(d + c) * v(c) + u(d + c) * dva(c) -
                         dva(d + c) * u(c) - v(d + c) * dua(c));
          }
          if (H != nullptr) {
            const Mat& Ha = Hs[static_cast<std::size_t>(a)];
            for (int i = 0; i < d; ++i)
              for (int j = 0; j < d; ++j)
                tb += Ha(i, j) * u(i) * v(j);  // H(X, Y, e_a)
          }
          w(a) = xa;
          w(d + a) = tb;
        }

        // N = pi_{0,1} w = (w + i J w)/2
        const CVec Jw = Jm.cast<cplx>() * w;
        const double nrm = (0.5 * (w + cplx(0.0, 1.0) * Jw)).cwiseAbs().maxCoeff();
        if (nrm > worst) worst = nrm;
      }
    }
  }
  return worst;
}

}  // namespace gk
