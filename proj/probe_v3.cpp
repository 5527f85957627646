// nijvar h-regimes + varform orders after the is_11 fix.
#include "gk/flows.hpp"

#include <chrono>
#include <cstdio>

using namespace gk;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

static GKState joyce(int N) {
  GKState hk = hyperkaehler_t4(N);
  TensorField u = scalar_field(hk.grid, [](const Vec& x) {
    return 0.05 * std::sin(x(0)) * std::sin(x(2));
  });
  return joyce_deform(hk, u, 0.15, 0.03);
}

static GKState curved_kaehler(int N) {
  Grid gr(2, N);
  TensorField u = scalar_field(gr, [](const Vec& x) {
    return 0.1 * std::sin(x(1)) * std::sin(x(2));
  });
  return kaehler_torus(u);
}

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

static double nijvar_residual(const GKState& s, const TensorField& K, double h,
                              const GenEndoField& Jf, int npairs) {
  const int d = 2 * s.grid.n;
  TensorField twist = s.H;
  twist -= ext_d(s.b);
  TensorField dK = ext_d(K);

  GenEndoField phi(s.grid);
  for (std::size_t t = 0; t < s.grid.npts(); ++t)
    set_endo(phi, t, phi_k(endo_at(Jf, t),
                           TwoForm(at_point(K, t).transpose()), kAssemblyTol));
  GenEndoField Jp = shifted(Jf, phi, h), Jm = shifted(Jf, phi, -h);

  double worst = 0.0;
  for (int pair = 0; pair < npairs; ++pair) {
    const int a = pair % (2 * d);
    const int b = (pair + 1 + pair / (2 * d)) % (2 * d);
    if (a == b) continue;
    CGenVectorField x = promote(frame_section(s.grid, a));
    CGenVectorField y = promote(frame_section(s.grid, b));

    CGenVectorField fd(s.grid);
    {
      CGenVectorField lhs = nijenhuis_pair(Jp, &twist, x, y);
      CGenVectorField nm = nijenhuis_pair(Jm, &twist, x, y);
      axpy(lhs, -1.0, 0.0, nm);
      axpy(fd, 1.0 / (2 * h), 0.0, lhs);
    }
    CGenVectorField rhs(s.grid);
    {
      CGenVectorField z(s.grid);
      for (std::size_t t = 0; t < s.grid.npts(); ++t) {
        const CMat Jmat = endo_at(Jf, t).m.cast<cplx>();
        const CMat P10 = 0.5 * (CMat::Identity(2 * d, 2 * d) - cplx(0, 1) * Jmat);
        CVec Xu = P10.col(a).head(d), Yv = P10.col(b).head(d);
        for (int c = 0; c < d; ++c) {
          cplx acc = 0.0;
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
              acc += dK.comp(dK.cindex({i, j, c}))[t] * Yv(i) * Xu(j);
          z.re.xi.comp(c)[t] = acc.real();
          z.im.xi.comp(c)[t] = acc.imag();
        }
      }
      CGenVectorField jz = apply_endo(Jf, z);
      CGenVectorField p(s.grid);
      axpy(p, 0.5, 0.0, z);
      axpy(p, 0.0, 0.5, jz);
      axpy(rhs, 0.0, 1.0, p);
    }
    CGenVectorField n0 = nijenhuis_pair(Jf, &twist, x, y);
    axpy(rhs, 0.0, -1.0, n0);
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
  }
  return worst;
}

static TensorField probe_k(const Grid& gr) {
  return sample_field(gr, form_valence(2),
      [](const Vec& x, const std::vector<int>& i) {
        if (i[0] == 2 && i[1] == 3) return std::sin(x(1));
        if (i[0] == 3 && i[1] == 2) return -std::sin(x(1));
        return 0.0;
      });
}

int main(int argc, char** argv) {
  setvbuf(stdout, nullptr, _IONBF, 0);
  const int stage = argc > 1 ? std::atoi(argv[1]) : 0;

  if (stage == 0 || stage == 1) {
    GKState ck = curved_kaehler(12);
    TensorField K = probe_k(ck.grid);
    for (double h : {4e-2, 2e-2, 1e-2}) {
      auto t0 = Clock::now();
      double r = nijvar_residual(ck, K, h, ck.J2, 6);
      std::printf("[N12 kaehler-J2] h=%.0e res %.3e (%.0f ms)\n", h, r, ms_since(t0));
    }
    GKState jy = joyce(12);
    TensorField Kj = probe_k(jy.grid);
    for (double h : {2e-2, 1e-2}) {
      double r1 = nijvar_residual(jy, Kj, h, jy.J1, 6);
      double r2 = nijvar_residual(jy, Kj, h, jy.J2, 6);
      std::printf("[N12 joyce] h=%.0e res J1 %.3e J2 %.3e\n", h, r1, r2);
    }
  }

  if (stage == 0 || stage == 2) {
    GKState ck = curved_kaehler(16);
    TensorField K = probe_k(ck.grid);
    for (double h : {1e-3, 5e-4}) {
      auto t0 = Clock::now();
      double r = nijvar_residual(ck, K, h, ck.J2, 6);
      std::printf("[N16 kaehler-J2] h=%.0e res %.3e (%.0f ms)\n", h, r, ms_since(t0));
    }
  }

  if (stage == 0 || stage == 3) {
    for (int which = 0; which < 2; ++which) {
      GKState s = which == 0 ? curved_kaehler(12) : joyce(12);
      const char* nm = which == 0 ? "kaehler" : "joyce";
      TensorField uu = scalar_field(s.grid, [](const Vec& x) {
        return 0.06 * std::sin(x(1)) * std::sin(x(2));
      });
      TensorField KK = potential_two_form(s, uu);
      for (double h : {1e-3, 5e-4}) {
        double worst = 0.0;
        for (std::size_t t = 0; t < s.grid.npts(); t += 7) {
          BihermData bh = biherm_at(s, t);
          const Mat Km = at_point(KK, t).transpose();
          TwoForm tf(Km, Tol{1e-8, 1e-8});
          Variation var = induced_variation(bh, tf, 1e-5);
          GenEndo j1 = endo_at(s.J1, t), j2 = endo_at(s.J2, t);
          GenEndo p1 = phi_k(j1, tf, kAssemblyTol), p2 = phi_k(j2, tf, kAssemblyTol);
          BihermData bp = extract_biherm(GenEndo(j1.m + h * p1.m, j1.d),
                                         GenEndo(j2.m + h * p2.m, j2.d),
                                         std::max(1e-8, 50 * h * h));
          const double rg = ((bp.g - bh.g) / h - var.g_dot).cwiseAbs().maxCoeff();
          const double rb = ((bp.b - bh.b) / h - var.b_dot).cwiseAbs().maxCoeff();
          const double ri = ((bp.I - bh.I) / h - var.I_dot).cwiseAbs().maxCoeff();
          const double rj = ((bp.J - bh.J) / h - var.J_dot).cwiseAbs().maxCoeff();
          const double rwi = ((bp.omega_I() - bh.omega_I()) / h - var.omega_I_dot)
                                 .cwiseAbs().maxCoeff();
          const double rwj = ((bp.omega_J() - bh.omega_J()) / h - var.omega_J_dot)
                                 .cwiseAbs().maxCoeff();
          worst = std::max({worst, rg, rb, ri, rj, rwi, rwj});
        }
        std::printf("[%s] varform h=%.0e residual %.3e\n", nm, h, worst);
      }
    }
  }
  return 0;
}
