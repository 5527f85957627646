#include "gk/connection.hpp"

#include <Eigen/Dense>

namespace gk {

namespace {

void check_metric(const TensorField& g, const char* where) {
  require(g.val.p == 2 && g.val.q == 0, where, "g must be a covariant rank-2 field");
}

void check_endo(const TensorField& I, const char* where) {
  require(I.val.p == 1 && I.val.q == 1, where, "I must be an endomorphism field");
}

}  // namespace

TensorField metric_inverse(const TensorField& g) {
  check_metric(g, "metric_inverse");
  const int d = g.grid.dim();
  Valence v;
  v.q = 2;
  TensorField out(g.grid, v);
  for (std::size_t pt = 0; pt < g.npts(); ++pt) {
    const Mat gp = at_point(g, pt);
    Eigen::LDLT<Mat> ldlt(gp);
    require(ldlt.info() == Eigen::Success && ldlt.isPositive(), "metric_inverse",
            "metric degenerate or not positive at a grid point");
    set_point(out, pt, ldlt.solve(Mat::Identity(d, d)));
  }
  return out;
}

TensorField omega_form(const TensorField& g, const TensorField& I) {
  check_metric(g, "omega_form");
  check_endo(I, "omega_form");
  TensorField out(g.grid, form_valence(2));
  for (std::size_t pt = 0; pt < g.npts(); ++pt) {
    const Mat gp = at_point(g, pt);
    const Mat Ip = at_point(I, pt);
    // array (a,b) = g(I e_a, e_b) = (I^T g)_{ab}; this is array_of_map(g I)
    set_point(out, pt, Ip.transpose() * gp);
  }
  return out;
}

TensorField h_flux(const TensorField& g, const TensorField& I) {
  // H = (d omega)(I., I., I.).  With the function-level d^c pinned to
  // d^c u = -du o I, this is the torsion sign for which the Bismut
  // connection satisfies nabla I = 0 (calibrated on conformal Hermitian
  // metrics, where the residual vanishes identically).
  TensorField H = pullback_slots(ext_d(omega_form(g, I)), I);
  H.val.antisym = true;
  return H;
}

TensorField levi_civita(const TensorField& g) {
  check_metric(g, "levi_civita");
  const int d = g.grid.dim();
  const std::size_t P = g.npts();

  // dg[c] = partial_c g
  std::vector<TensorField> dg;
  dg.reserve(d);
  for (int c = 0; c < d; ++c) dg.push_back(partial(g, c));

  TensorField ginv = metric_inverse(g);
  TensorField out(g.grid, connection_valence());
  Mat G(d, d);
  for (std::size_t pt = 0; pt < P; ++pt) {
    const Mat gi = at_point(ginv, pt);
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        for (int e = 0; e < d; ++e) {
          // 1/2 (d_b g_{ec} + d_c g_{eb} - d_e g_{bc})
          G(e, 0) = 0.5 * (dg[b].comp(dg[b].cindex({e, c}))[pt] +
                           dg[c].comp(dg[c].cindex({e, b}))[pt] -
                           dg[e].comp(dg[e].cindex({b, c}))[pt]);
        }
        for (int a = 0; a < d; ++a) {
          double v = 0.0;
          for (int e = 0; e < d; ++e) v += gi(a, e) * G(e, 0);
          out.comp(out.cindex({a, b, c}))[pt] = v;
        }
      }
  }
  return out;
}

TensorField bismut(const TensorField& g, const TensorField& H) {
  check_metric(g, "bismut");
  require(H.val.p == 3 && H.val.antisym, "bismut", "H must be a 3-form");
  require(g.grid == H.grid, "bismut", "grid mismatch");
  const int d = g.grid.dim();

  TensorField out = levi_civita(g);
  TensorField ginv = metric_inverse(g);
  for (std::size_t pt = 0; pt < g.npts(); ++pt) {
    const Mat gi = at_point(ginv, pt);
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int a = 0; a < d; ++a) {
          double v = 0.0;
          for (int e = 0; e < d; ++e)
            v += gi(a, e) * H.comp(H.cindex({b, c, e}))[pt];
          out.comp(out.cindex({a, b, c}))[pt] += 0.5 * v;
        }
  }
  return out;
}

TensorField cov_deriv(const TensorField& T, const TensorField& Gamma) {
  require(Gamma.val.q == 1 && Gamma.val.p == 2, "cov_deriv",
          "Gamma must be a connection coefficient field");
  require(T.grid == Gamma.grid, "cov_deriv", "grid mismatch");
  const int d = T.grid.dim();
  const int r = T.val.rank();
  const int q = T.val.q;
  const std::size_t P = T.npts();

  Valence ov;
  ov.q = q;
  ov.p = T.val.p + 1;
  TensorField out(T.grid, ov);

  // component index helpers: out slot order is (uppers, deriv c, lowers);
  // T components appear as the inner block of size d^{p} for each (uppers, c)
  std::size_t lower_block = 1;
  for (int i = 0; i < T.val.p; ++i) lower_block *= static_cast<std::size_t>(d);

  auto slot_of = [d](std::size_t k, int j, int rank) {
    std::size_t div = 1;
    for (int t = j + 1; t < rank; ++t) div *= static_cast<std::size_t>(d);
    return static_cast<int>((k / div) % static_cast<std::size_t>(d));
  };
  auto with_slot = [d](std::size_t k, int j, int c, int rank) {
    std::size_t div = 1;
    for (int t = j + 1; t < rank; ++t) div *= static_cast<std::size_t>(d);
    const int old = static_cast<int>((k / div) % static_cast<std::size_t>(d));
    return k + static_cast<std::size_t>(c - old) * div;
  };

  for (int c = 0; c < d; ++c) {
    TensorField dT = partial(T, c);
    for (std::size_t m = 0; m < T.ncomp(); ++m) {
      // out component: insert c between the upper block and the lower block
      const std::size_t uppers = m / lower_block;
      const std::size_t lowers = m % lower_block;
      const std::size_t om =
          (uppers * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)) * lower_block +
          lowers;
      double* dst = out.comp(om);
      const double* src = dT.comp(m);
      std::copy(src, src + P, dst);

      for (int j = 0; j < r; ++j) {
        const int s = slot_of(m, j, r);
        for (int e = 0; e < d; ++e) {
          const double* tpl = T.comp(with_slot(m, j, e, r));
          if (j < q) {
            // upper slot: + Gamma^{s}_{c e} T^{.. e ..}
            const double* gpl = Gamma.comp(Gamma.cindex({s, c, e}));
            for (std::size_t p = 0; p < P; ++p) dst[p] += gpl[p] * tpl[p];
          } else {
            // lower slot: - Gamma^{e}_{c s} T_{.. e ..}
            const double* gpl = Gamma.comp(Gamma.cindex({e, c, s}));
            for (std::size_t p = 0; p < P; ++p) dst[p] -= gpl[p] * tpl[p];
          }
        }
      }
    }
  }
  return out;
}

TensorField codiff(const TensorField& f, const TensorField& g) {
  require(f.val.q == 0 && f.val.rank() >= 1 && f.val.is_form(), "codiff",
          "input must be a form of rank >= 1");
  check_metric(g, "codiff");
  require(f.grid == g.grid, "codiff", "grid mismatch");
  const int d = f.grid.dim();
  const int k = f.val.p;
  const std::size_t P = f.npts();

  TensorField D = cov_deriv(f, levi_civita(g));  // slots (c, b, a_2 .. a_k)
  TensorField ginv = metric_inverse(g);

  TensorField out(f.grid, form_valence(k - 1));
  std::size_t rest = out.ncomp();
  for (std::size_t pt = 0; pt < P; ++pt) {
    const Mat gi = at_point(ginv, pt);
    for (std::size_t m = 0; m < rest; ++m) {
      double v = 0.0;
      for (int c = 0; c < d; ++c)
        for (int b = 0; b < d; ++b) {
          const std::size_t dm =
              (static_cast<std::size_t>(c) * static_cast<std::size_t>(d) +
               static_cast<std::size_t>(b)) *
                  rest +
              m;
          v += gi(c, b) * D.comp(dm)[pt];
        }
      out.comp(m)[pt] = -v;
    }
  }
  return out;
}

TensorField ricci_of(const TensorField& Gamma) {
  require(Gamma.val.q == 1 && Gamma.val.p == 2, "ricci_of",
          "Gamma must be a connection coefficient field");
  const Grid& gr = Gamma.grid;
  const int d = gr.dim();
  const std::size_t P = Gamma.npts();

  Valence v2;
  v2.p = 2;
  TensorField Rc(gr, v2);

  // T1_{db} = sum_a d_a Gamma^a_{db}: per axis a, differentiate the rank-2
  // slice Gamma^a and accumulate
  for (int a = 0; a < d; ++a) {
    TensorField slice(gr, v2);
    for (int b2 = 0; b2 < d; ++b2)
      for (int c = 0; c < d; ++c) {
        const double* src = Gamma.comp(Gamma.cindex({a, b2, c}));
        std::copy(src, src + P, slice.comp(slice.cindex({b2, c})));
      }
    TensorField ds = partial(slice, a);
    Rc += ds;
  }

  // T2_{db} = d_d C_b with C_b = Gamma^a_{ab}
  Valence v1;
  v1.p = 1;
  TensorField C(gr, v1);
  for (int b = 0; b < d; ++b) {
    double* dst = C.comp(static_cast<std::size_t>(b));
    for (int a = 0; a < d; ++a) {
      const double* src = Gamma.comp(Gamma.cindex({a, a, b}));
      for (std::size_t p = 0; p < P; ++p) dst[p] += src[p];
    }
  }
  for (int dd = 0; dd < d; ++dd) {
    TensorField dC = partial(C, dd);
    for (int b = 0; b < d; ++b) {
      double* dst = Rc.comp(Rc.cindex({dd, b}));
      const double* src = dC.comp(static_cast<std::size_t>(b));
      for (std::size_t p = 0; p < P; ++p) dst[p] -= src[p];
    }
  }

  // quadratic terms, pointwise: +t_e Gamma^e_{db} - Gamma^a_{de} Gamma^e_{ab}
  std::vector<Mat> S(static_cast<std::size_t>(d), Mat(d, d));
  Vec t(d);
  for (std::size_t pt = 0; pt < P; ++pt) {
    for (int c = 0; c < d; ++c)
      for (int a = 0; a < d; ++a)
        for (int e = 0; e < d; ++e)
          S[static_cast<std::size_t>(c)](a, e) = Gamma.comp(Gamma.cindex({a, c, e}))[pt];
    for (int e = 0; e < d; ++e) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += S[static_cast<std::size_t>(a)](a, e);
      t(e) = s;
    }
    for (int dd = 0; dd < d; ++dd)
      for (int b = 0; b < d; ++b) {
        double v = 0.0;
        for (int e = 0; e < d; ++e) {
          v += t(e) * S[static_cast<std::size_t>(dd)](e, b);
          for (int a = 0; a < d; ++a)
            v -= S[static_cast<std::size_t>(dd)](a, e) * S[static_cast<std::size_t>(a)](e, b);
        }
        Rc.comp(Rc.cindex({dd, b}))[pt] += v;
      }
  }
  return Rc;
}

TensorField ricci_tensor(const TensorField& g) { return ricci_of(levi_civita(g)); }

BismutRicci bismut_ricci(const TensorField& g, const TensorField& I) {
  check_metric(g, "bismut_ricci");
  check_endo(I, "bismut_ricci");
  require(g.grid == I.grid, "bismut_ricci", "grid mismatch");
  const Grid& gr = g.grid;
  const int d = gr.dim();
  const std::size_t P = g.npts();

  TensorField H = h_flux(g, I);
  TensorField GB = bismut(g, H);

  // derivative part: A_{cd} = (d_c Gamma^a_{db}) I^b_a, streamed per axis c
  Valence v2;
  v2.p = 2;
  TensorField A(gr, v2);
  for (int c = 0; c < d; ++c) {
    TensorField dG = partial(GB, c);
    for (int dd = 0; dd < d; ++dd) {
      double* dst = A.comp(A.cindex({c, dd}));
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          const double* gpl = dG.comp(dG.cindex({a, dd, b}));
          const double* ipl = I.comp(I.cindex({b, a}));
          for (std::size_t p = 0; p < P; ++p) dst[p] += gpl[p] * ipl[p];
        }
    }
  }

  BismutRicci out;
  out.rho = TensorField(gr, form_valence(2));
  std::vector<Mat> S(static_cast<std::size_t>(d), Mat(d, d));
  for (std::size_t pt = 0; pt < P; ++pt) {
    const Mat Ip = at_point(I, pt);
    for (int c = 0; c < d; ++c)
      for (int a = 0; a < d; ++a)
        for (int e = 0; e < d; ++e)
          S[static_cast<std::size_t>(c)](a, e) = GB.comp(GB.cindex({a, c, e}))[pt];
    for (int c = 0; c < d; ++c)
      for (int dd = c + 1; dd < d; ++dd) {
        const Mat comm = S[static_cast<std::size_t>(c)] * S[static_cast<std::size_t>(dd)] -
                         S[static_cast<std::size_t>(dd)] * S[static_cast<std::size_t>(c)];
        const double quad = (comm * Ip).trace();
        const double v = 0.5 * (A.comp(A.cindex({c, dd}))[pt] - A.comp(A.cindex({dd, c}))[pt] + quad);
        out.rho.comp(out.rho.cindex({c, dd}))[pt] = v;
        out.rho.comp(out.rho.cindex({dd, c}))[pt] = -v;
      }
  }

  // I-type split: rho11 = 1/2 (rho + rho(I., I.))
  TensorField pulled = pullback_slots(out.rho, I);
  out.rho11 = 0.5 * (out.rho + pulled);
  out.rho11.val.antisym = true;
  out.rho02 = out.rho - out.rho11;
  out.rho02.val.antisym = true;
  return out;
}

TensorField lee_form(const TensorField& g, const TensorField& I) {
  TensorField dsw = codiff(omega_form(g, I), g);
  return pullback_slots(dsw, I);
}

TensorField h_squared(const TensorField& g, const TensorField& H) {
  check_metric(g, "h_squared");
  require(H.val.p == 3 && H.val.antisym, "h_squared", "H must be a 3-form");
  const int d = g.grid.dim();
  const std::size_t P = g.npts();
  TensorField ginv = metric_inverse(g);

  Valence v2;
  v2.p = 2;
  TensorField out(g.grid, v2);
  std::vector<Mat> Hm(static_cast<std::size_t>(d), Mat(d, d));
  for (std::size_t pt = 0; pt < P; ++pt) {
    const Mat gi = at_point(ginv, pt);
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          Hm[static_cast<std::size_t>(a)](i, j) = H.comp(H.cindex({a, i, j}))[pt];
    for (int a = 0; a < d; ++a) {
      const Mat Ba = gi * Hm[static_cast<std::size_t>(a)] * gi;
      for (int b = a; b < d; ++b) {
        const double v = (Hm[static_cast<std::size_t>(b)].transpose() * Ba).trace();
        out.comp(out.cindex({a, b}))[pt] = v;
        out.comp(out.cindex({b, a}))[pt] = v;
      }
    }
  }
  return out;
}

}  // namespace gk
