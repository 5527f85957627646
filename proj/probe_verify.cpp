// Calibration probe for the verification-harness identities (not shipped).
#include "gk/flows.hpp"

#include <chrono>
#include <cstdio>
#include <random>

using namespace gk;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

static GKState curved_kaehler(int N) {
  Grid gr(2, N);
  TensorField u = scalar_field(gr, [](const Vec& x) {
    return 0.1 * std::sin(x(1)) * std::sin(x(2));
  });
  return kaehler_torus(u);
}

static GKState joyce(int N) {
  GKState hk = hyperkaehler_t4(N);
  TensorField u = scalar_field(hk.grid, [](const Vec& x) {
    return 0.05 * std::sin(x(0)) * std::sin(x(2));
  });
  return joyce_deform(hk, u, 0.15, 0.03);
}

static double max_diff(const TensorField& a, const TensorField& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.ncomp(); ++c)
    for (std::size_t t = 0; t < a.npts(); ++t)
      m = std::max(m, std::abs(a.comp(c)[t] - b.comp(c)[t]));
  return m;
}

// arr(a,b) = f(I e_a, e_b) from a 2-form array f
static TensorField pre_I(const TensorField& f, const TensorField& I) {
  TensorField out(f.grid, form_valence(2));
  for (std::size_t t = 0; t < f.npts(); ++t) {
    const Mat Ip = at_point(I, t);
    set_point(out, t, Ip.transpose() * at_point(f, t));
  }
  return out;
}

// arr(a,b) = f(e_a, I e_b)
static TensorField post_I(const TensorField& f, const TensorField& I) {
  TensorField out(f.grid, form_valence(2));
  for (std::size_t t = 0; t < f.npts(); ++t)
    set_point(out, t, at_point(f, t) * at_point(I, t));
  return out;
}

static TensorField part02(const TensorField& K, const TensorField& I) {
  TensorField out(K.grid, form_valence(2));
  for (std::size_t t = 0; t < K.npts(); ++t) {
    const Mat k = at_point(K, t), Ip = at_point(I, t);
    set_point(out, t, 0.5 * (k - Ip.transpose() * k * Ip));
  }
  return out;
}

static void stage_bismut(const GKState& s, const char* name) {
  auto t0 = Clock::now();
  BismutRicci br = bismut_ricci(s.g, s.I);
  TensorField Rc = ricci_tensor(s.g);
  TensorField H = h_flux(s.g, s.I);
  TensorField H2 = h_squared(s.g, H);
  TensorField th = lee_form(s.g, s.I);
  TensorField ths = sharp(th, s.g);
  TensorField Ltg = lie(ths, s.g);

  // r1: rho11(., I.) = Rc - 1/4 H2 - 1/2 L_theta g, both slot variants
  TensorField rhs1 = Rc;
  TensorField h2s = H2; h2s *= 0.25; rhs1 -= h2s;
  TensorField lts = Ltg; lts *= 0.5; rhs1 -= lts;
  std::printf("[%s] r1 post_I %.3e   pre_I %.3e\n", name,
              max_diff(post_I(br.rho11, s.I), rhs1),
              max_diff(pre_I(br.rho11, s.I), rhs1));

  // r2: rho02 = +-1/2 (d*H(I.,.) + dnabla-theta(I.,.)), dnabla variants
  TensorField dsH = codiff(H, s.g);
  TensorField dth = ext_d(th);
  TensorField ith = interior(ths, H);
  const char* vn[3] = {"LC      ", "B-minus ", "B-plus  "};
  for (int v = 0; v < 3; ++v) {
    TensorField dn = dth;
    if (v == 1) dn -= ith;
    if (v == 2) dn += ith;
    TensorField sum = pre_I(dsH, s.I);
    sum += pre_I(dn, s.I);
    sum *= 0.5;
    TensorField neg = sum; neg *= -1.0;
    std::printf("[%s] r2 %s  +: %.3e   -: %.3e\n", name, vn[v],
                max_diff(br.rho02, sum), max_diff(br.rho02, neg));
  }
  // also with the post-I slot in case the pre-I family all misses
  for (int v = 0; v < 3; ++v) {
    TensorField dn = dth;
    if (v == 1) dn -= ith;
    if (v == 2) dn += ith;
    TensorField sum = post_I(dsH, s.I);
    sum += post_I(dn, s.I);
    sum *= 0.5;
    TensorField neg = sum; neg *= -1.0;
    std::printf("[%s] r2p %s +: %.3e   -: %.3e\n", name, vn[v],
                max_diff(br.rho02, sum), max_diff(br.rho02, neg));
  }

  // r3: rho02 = (d(I theta))^{2,0+0,2}, sign of I theta
  for (int si = 0; si < 2; ++si) {
    TensorField ith1(s.grid, form_valence(1));
    for (std::size_t t = 0; t < s.grid.npts(); ++t) {
      const Mat Ip = at_point(s.I, t);
      Vec v = Ip.transpose() * vec_at_point(th, t);
      if (si == 1) v = -v;
      for (int a = 0; a < Ip.rows(); ++a) ith1.comp(a)[t] = v(a);
    }
    TensorField d02 = part02(ext_d(ith1), s.I);
    std::printf("[%s] r3 sign %c %.3e\n", name, si == 0 ? '+' : '-',
                max_diff(br.rho02, d02));
  }
  std::printf("[%s] |rho| %.3e |rho02| %.3e |H| %.3e |theta| %.3e  (%.0f ms)\n",
              name, br.rho.max_abs(), br.rho02.max_abs(), H.max_abs(),
              th.max_abs(), ms_since(t0));
}

static void stage_sigchern(const GKState& s) {
  auto t0 = Clock::now();
  BismutRicci br = bismut_ricci(s.g, s.I);
  TensorField diff = lee_form(s.g, s.J);
  diff -= lee_form(s.g, s.I);
  TensorField W = sharp(diff, s.g);
  TensorField LWJ = lie(W, s.J);
  double res = 0.0, is11 = 0.0, sz = 0.0;
  for (std::size_t t = 0; t < s.grid.npts(); ++t) {
    const Mat g = at_point(s.g, t), Ip = at_point(s.I, t), Jp = at_point(s.J, t);
    const Mat C = Ip * Jp - Jp * Ip;
    const Mat rho = at_point(br.rho, t).transpose();  // map
    const Mat lhs = g * at_point(LWJ, t);
    res = std::max(res, (lhs + C.transpose() * rho).cwiseAbs().maxCoeff());
    sz = std::max(sz, lhs.cwiseAbs().maxCoeff());
    is11 = std::max(is11, (rho * Jp + Jp.transpose() * rho).cwiseAbs().maxCoeff());
  }
  std::printf("[sigchern] res %.3e  size %.3e  rho-11-wrt-J %.3e  (%.0f ms)\n",
              res, sz, is11, ms_since(t0));
}

struct PartialRes { double main = 0.0, conj = 0.0; };

static PartialRes partial_residual(const GKState& s, const GenEndoField& Jf,
                                   const TensorField& dK) {
  PartialRes out;
  const int d = 2 * s.grid.n;
  for (std::size_t t = 0; t < s.grid.npts(); ++t) {
    const CMat Jm = endo_at(Jf, t).m.cast<cplx>();
    const CMat P10 = 0.5 * (CMat::Identity(2 * d, 2 * d) - cplx(0, 1) * Jm);
    const CMat P01 = 0.5 * (CMat::Identity(2 * d, 2 * d) + cplx(0, 1) * Jm);
    for (int a = 0; a < 2 * d; ++a)
      for (int b = a + 1; b < 2 * d; ++b) {
        for (int pass = 0; pass < 2; ++pass) {
          const CMat& P = pass == 0 ? P10 : P01;
          CVec Xu = P.col(a).head(d), Xv = P.col(b).head(d);
          CVec z = CVec::Zero(2 * d);
          for (int c = 0; c < d; ++c) {
            cplx acc = 0.0;
            for (int i = 0; i < d; ++i)
              for (int j = 0; j < d; ++j)
                acc += dK.comp(dK.cindex({i, j, c}))[t] * Xv(i) * Xu(j);
            z(d + c) = acc;
          }
          const double r = (P01 * z).cwiseAbs().maxCoeff();
          (pass == 0 ? out.main : out.conj) = std::max(pass == 0 ? out.main : out.conj, r);
        }
      }
  }
  return out;
}

static void stage_partial(const GKState& s, const char* name) {
  auto t0 = Clock::now();
  TensorField Knc = sample_field(s.grid, form_valence(2),
      [](const Vec& x, const std::vector<int>& i) {
        if (i[0] == 2 && i[1] == 3) return std::sin(x(1));
        if (i[0] == 3 && i[1] == 2) return -std::sin(x(1));
        return 0.0;
      });
  TensorField dK = ext_d(Knc);
  PartialRes r1 = partial_residual(s, s.J1, dK);
  PartialRes r2 = partial_residual(s, s.J2, dK);
  std::printf("[%s] partial nonclosed: J1 %.3e/%.3e  J2 %.3e/%.3e  |dK| %.3e (%.0f ms)\n",
              name, r1.main, r1.conj, r2.main, r2.conj, dK.max_abs(), ms_since(t0));

  TensorField u = scalar_field(s.grid, [](const Vec& x) {
    return 0.07 * std::sin(x(0)) * std::cos(x(3));
  });
  TensorField Kc = potential_two_form(s, u);
  TensorField dKc = ext_d(Kc);
  r1 = partial_residual(s, s.J1, dKc);
  r2 = partial_residual(s, s.J2, dKc);
  std::printf("[%s] partial closed:    J1 %.3e/%.3e  J2 %.3e/%.3e  |dK| %.3e\n",
              name, r1.main, r1.conj, r2.main, r2.conj, dKc.max_abs());
}

// ---- Nijenhuis variation ----
static CGenVectorField promote(const GenVectorField& v) {
  CGenVectorField out(v.X.grid);
  out.re = v;
  return out;
}

static void axpy(CGenVectorField& acc, double re, double im,
                 const CGenVectorField& v) {
  auto add = [&](TensorField& a, const TensorField& x, double c) {
    for (std::size_t k = 0; k < a.ncomp(); ++k)
      for (std::size_t t = 0; t < a.npts(); ++t) a.comp(k)[t] += c * x.comp(k)[t];
  };
  // (re + i im) * (v.re + i v.im)
  add(acc.re.X, v.re.X, re);  add(acc.re.xi, v.re.xi, re);
  add(acc.im.X, v.im.X, re);  add(acc.im.xi, v.im.xi, re);
  add(acc.re.X, v.im.X, -im); add(acc.re.xi, v.im.xi, -im);
  add(acc.im.X, v.re.X, im);  add(acc.im.xi, v.re.xi, im);
}

static GenEndoField shifted(const GenEndoField& J, const GenEndoField& P, double h) {
  GenEndoField out(J.grid());
  for (std::size_t t = 0; t < J.grid().npts(); ++t) {
    GenEndo a = endo_at(J, t), p = endo_at(P, t);
    set_endo(out, t, GenEndo(a.m + h * p.m, a.d));
  }
  return out;
}

static CGenVectorField bshear_c(const TensorField& K, const CGenVectorField& v) {
  CGenVectorField out(K.grid);
  out.re = b_shear(K, v.re);
  out.im = b_shear(K, v.im);
  return out;
}

static void stage_nijvar(const GKState& s, const TensorField& K, double h,
                         const GenEndoField& Jf, const char* name, int npairs) {
  auto t0 = Clock::now();
  const int d = 2 * s.grid.n;
  TensorField twist = s.H;
  twist -= ext_d(s.b);
  TensorField dK = ext_d(K);

  GenEndoField phi(s.grid);
  for (std::size_t t = 0; t < s.grid.npts(); ++t)
    set_endo(phi, t, phi_k(endo_at(Jf, t),
                           TwoForm(at_point(K, t).transpose()), kAssemblyTol));
  GenEndoField Jp = shifted(Jf, phi, h), Jm = shifted(Jf, phi, -h);

  double worst = 0.0, scale = 0.0;
  std::mt19937_64 rng(7);
  for (int pair = 0; pair < npairs; ++pair) {
    const int a = pair % (2 * d);
    const int b = (pair + 1 + pair / (2 * d)) % (2 * d);
    if (a == b) continue;
    CGenVectorField x = promote(frame_section(s.grid, a));
    CGenVectorField y = promote(frame_section(s.grid, b));

    CGenVectorField lhs = nijenhuis_pair(Jp, &twist, x, y);
    {
      CGenVectorField nm = nijenhuis_pair(Jm, &twist, x, y);
      axpy(lhs, -1.0, 0.0, nm);
    }
    // lhs = (N+ - N-) / (2h)
    CGenVectorField fd(s.grid);
    axpy(fd, 1.0 / (2 * h), 0.0, lhs);

    // rhs
    CGenVectorField rhs(s.grid);
    // t1 = i pi01( dK(pi_T pi10 y, pi_T pi10 x, .) )
    {
      CGenVectorField z(s.grid);
      for (std::size_t t = 0; t < s.grid.npts(); ++t) {
        const CMat Jmat = endo_at(Jf, t).m.cast<cplx>();
        const CMat P10 = 0.5 * (CMat::Identity(2 * d, 2 * d) - cplx(0, 1) * Jmat);
        CVec xu(2 * d), yv(2 * d);
        for (int k = 0; k < d; ++k) {
          xu(k) = cplx(x.re.X.comp(k)[t], x.im.X.comp(k)[t]);
          xu(d + k) = cplx(x.re.xi.comp(k)[t], x.im.xi.comp(k)[t]);
          yv(k) = cplx(y.re.X.comp(k)[t], y.im.X.comp(k)[t]);
          yv(d + k) = cplx(y.re.xi.comp(k)[t], y.im.xi.comp(k)[t]);
        }
        CVec Xu = (P10 * xu).head(d), Yv = (P10 * yv).head(d);
        for (int c = 0; c < d; ++c) {
          cplx acc = 0.0;
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
              acc += dK.comp(dK.cindex({i, j, c}))[t] * Yv(i) * Xu(j);
          z.re.xi.comp(c)[t] = acc.real();
          z.im.xi.comp(c)[t] = acc.imag();
        }
      }
      // pi01 z, then multiply by i
      CGenVectorField jz = apply_endo(Jf, z);
      CGenVectorField p(s.grid);
      axpy(p, 0.5, 0.0, z);
      axpy(p, 0.0, 0.5, jz);  // (z + i J z)/2
      axpy(rhs, 0.0, 1.0, p);
    }
    CGenVectorField n0 = nijenhuis_pair(Jf, &twist, x, y);
    axpy(rhs, 0.0, -1.0, n0);  // -i N0
    {
      CGenVectorField t3 = apply_endo(Jf, bshear_c(K, n0));
      axpy(rhs, 1.0, 0.0, t3);
    }
    {
      CGenVectorField ekjx = bshear_c(K, apply_endo(Jf, x));
      CGenVectorField t4 = nijenhuis_pair(Jf, &twist, ekjx, y);
      axpy(rhs, 1.0, 0.0, t4);
    }
    {
      CGenVectorField ekjy = bshear_c(K, apply_endo(Jf, y));
      CGenVectorField t5 = nijenhuis_pair(Jf, &twist, x, ekjy);
      axpy(rhs, 1.0, 0.0, t5);
    }
    axpy(rhs, -1.0, 0.0, fd);
    worst = std::max(worst, max_abs(rhs));
    scale = std::max(scale, max_abs(fd));
  }
  std::printf("[%s] nijvar h=%.0e residual %.3e (fd scale %.3e) %d pairs (%.0f ms)\n",
              name, h, worst, scale, npairs, ms_since(t0));
}

static void stage_varform(const GKState& s, double h, const char* name) {
  auto t0 = Clock::now();
  TensorField u = scalar_field(s.grid, [](const Vec& x) {
    return 0.06 * std::sin(x(1)) * std::sin(x(2));
  });
  TensorField K = potential_two_form(s, u);
  double worst = 0.0;
  for (std::size_t t = 0; t < s.grid.npts(); t += 7) {
    BihermData bh = biherm_at(s, t);
    const Mat Km = at_point(K, t).transpose();
    TwoForm tf(Km);
    Variation var = induced_variation(bh, tf, 1e-6);
    GenEndo j1 = endo_at(s.J1, t), j2 = endo_at(s.J2, t);
    GenEndo p1 = phi_k(j1, tf, kAssemblyTol), p2 = phi_k(j2, tf, kAssemblyTol);
    BihermData bp = extract_biherm(GenEndo(j1.m + h * p1.m, j1.d),
                                   GenEndo(j2.m + h * p2.m, j2.d),
                                   std::max(1e-8, 50 * h * h));
    const double rg = ((bp.g - bh.g) / h - var.g_dot).cwiseAbs().maxCoeff();
    const double rb = ((bp.b - bh.b) / h - var.b_dot).cwiseAbs().maxCoeff();
    const double ri = ((bp.I - bh.I) / h - var.I_dot).cwiseAbs().maxCoeff();
    const double rj = ((bp.J - bh.J) / h - var.J_dot).cwiseAbs().maxCoeff();
    const double rwi =
        ((bp.omega_I() - bh.omega_I()) / h - var.omega_I_dot).cwiseAbs().maxCoeff();
    const double rwj =
        ((bp.omega_J() - bh.omega_J()) / h - var.omega_J_dot).cwiseAbs().maxCoeff();
    worst = std::max({worst, rg, rb, ri, rj, rwi, rwj});
  }
  std::printf("[%s] varform h=%.0e residual %.3e (%.0f ms)\n", name, h, worst,
              ms_since(t0));
}

int main() {
  setvbuf(stdout, nullptr, _IONBF, 0);

  GKState ck = curved_kaehler(12);
  GKState jy = joyce(12);
  std::printf("states built\n");

  stage_bismut(ck, "kaehler");
  stage_bismut(jy, "joyce");
  stage_sigchern(jy);
  stage_partial(ck, "kaehler");
  stage_partial(jy, "joyce");

  TensorField K = sample_field(ck.grid, form_valence(2),
      [](const Vec& x, const std::vector<int>& i) {
        if (i[0] == 2 && i[1] == 3) return std::sin(x(1));
        if (i[0] == 3 && i[1] == 2) return -std::sin(x(1));
        return 0.0;
      });
  stage_nijvar(ck, K, 1e-3, ck.J1, "kaehler-J1", 8);
  stage_nijvar(ck, K, 5e-4, ck.J1, "kaehler-J1", 8);
  stage_nijvar(ck, K, 1e-3, ck.J2, "kaehler-J2", 8);
  stage_nijvar(ck, K, 5e-4, ck.J2, "kaehler-J2", 8);

  stage_varform(jy, 1e-3, "joyce");
  stage_varform(jy, 5e-4, "joyce");
  stage_varform(ck, 1e-3, "kaehler");
  return 0;
}
