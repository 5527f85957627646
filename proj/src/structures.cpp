#include "gk/structures.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace gk {
namespace {

Valence sigma_valence() {
  Valence v;
  v.q = 2;
  return v;
}

void muladd(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] * b[i];
}

double min_eig(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

// Metric from a Hermitian form: g = -omega_map I, symmetrized; returns the
// worst positivity margin alongside.
std::pair<TensorField, double> metric_of_form(const TensorField& omega,
                                              const Mat& I0) {
  const Grid& gr = omega.grid;
  TensorField g(gr, metric_valence());
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t pt = 0; pt < gr.npts(); ++pt) {
    const Mat wm = at_point(omega, pt).transpose();
    Mat gm = -wm * I0;
    gm = 0.5 * (gm + gm.transpose()).eval();
    margin = std::min(margin, min_eig(gm));
    set_point(g, pt, gm);
  }
  return {std::move(g), margin};
}

// Array storage of -1/2 {K, I} for an array 2-form K and constant I.
TensorField half_anticommutator(const TensorField& Karr, const Mat& I0) {
  TensorField out(Karr.grid, form_valence(2));
  for (std::size_t pt = 0; pt < Karr.grid.npts(); ++pt) {
    const Mat Km = at_point(Karr, pt).transpose();
    const Mat bd = -0.5 * (Km * I0 + I0.transpose() * Km);
    set_point(out, pt, bd.transpose());
  }
  return out;
}

}  // namespace

Mat standard_complex_structure(int n) {
  const int d = 2 * n;
  Mat I0 = Mat::Zero(d, d);
  for (int k = 0; k < n; ++k) {
    I0(2 * k + 1, 2 * k) = 1.0;  // I e_{2k} = e_{2k+1}
    I0(2 * k, 2 * k + 1) = -1.0;
  }
  return I0;
}

GKState make_state(TensorField g, TensorField b, TensorField I, TensorField J) {
  const Grid gr = g.grid;
  require(b.grid == gr && I.grid == gr && J.grid == gr, "make_state",
          "fields live on different grids");
  require(g.val.p == 2 && g.val.q == 0 && b.val.p == 2 && b.val.q == 0,
          "make_state", "g and b must be rank-2 covariant");
  require(I.val.p == 1 && I.val.q == 1 && J.val.p == 1 && J.val.q == 1,
          "make_state", "I and J must be endomorphism fields");

  GKState s;
  s.grid = gr;
  s.g = std::move(g);
  s.b = std::move(b);
  s.I = std::move(I);
  s.J = std::move(J);
  s.omega_I = omega_form(s.g, s.I);
  s.omega_J = omega_form(s.g, s.J);
  s.H = h_flux(s.g, s.I);
  s.sigma = TensorField(gr, sigma_valence());
  s.J1 = GenEndoField(gr);
  s.J2 = GenEndoField(gr);
  for (std::size_t pt = 0; pt < gr.npts(); ++pt) {
    const BihermData bh = biherm_at(s, pt);
    set_point(s.sigma, pt, bh.sigma());
    const auto [j1, j2] = gualtieri_map(bh, kAssemblyTol);
    set_endo(s.J1, pt, j1);
    set_endo(s.J2, pt, j2);
  }
  return s;
}

BihermData biherm_at(const GKState& s, std::size_t pt) {
  BihermData bh;
  bh.g = at_point(s.g, pt);
  bh.b = at_point(s.b, pt).transpose();
  bh.I = at_point(s.I, pt);
  bh.J = at_point(s.J, pt);
  return bh;
}

double CertifyReport::worst() const {
  double w = fiber_residual;
  w = std::max(w, torsion_residual);
  w = std::max(w, dH_residual);
  w = std::max(w, nijenhuis_j1);
  w = std::max(w, nijenhuis_j2);
  w = std::max(w, cache_residual);
  return w;
}

CertifyReport certify(const GKState& s) {
  const Grid& gr = s.grid;
  const int d = gr.dim();
  const Mat Id = Mat::Identity(d, d);
  CertifyReport r;
  r.positivity_margin = std::numeric_limits<double>::infinity();

  // Recompute the caches from (g, b, I, J).
  const TensorField wI = omega_form(s.g, s.I);
  const TensorField wJ = omega_form(s.g, s.J);
  const TensorField HI = h_flux(s.g, s.I);
  const TensorField HJ = h_flux(s.g, s.J);
  r.torsion_residual = (HI + HJ).max_abs();
  r.dH_residual = closedness_residual(s.H);
  r.cache_residual = std::max({(wI - s.omega_I).max_abs(),
                               (wJ - s.omega_J).max_abs(),
                               (HI - s.H).max_abs()});

  for (std::size_t pt = 0; pt < gr.npts(); ++pt) {
    const BihermData bh = biherm_at(s, pt);
    double f = (bh.I * bh.I + Id).cwiseAbs().maxCoeff();
    f = std::max(f, (bh.J * bh.J + Id).cwiseAbs().maxCoeff());
    f = std::max(f, (bh.g - bh.g.transpose()).cwiseAbs().maxCoeff());
    f = std::max(f, (bh.b + bh.b.transpose()).cwiseAbs().maxCoeff());
    f = std::max(f, (bh.I.transpose() * bh.g * bh.I - bh.g).cwiseAbs().maxCoeff());
    f = std::max(f, (bh.J.transpose() * bh.g * bh.J - bh.g).cwiseAbs().maxCoeff());
    r.fiber_residual = std::max(r.fiber_residual, f);
    r.positivity_margin = std::min(r.positivity_margin, min_eig(bh.g));

    double c = (bh.sigma() - at_point(s.sigma, pt)).cwiseAbs().maxCoeff();
    const auto [j1, j2] = gualtieri_map(bh, kAssemblyTol);
    c = std::max(c, (j1.m - endo_at(s.J1, pt).m).cwiseAbs().maxCoeff());
    c = std::max(c, (j2.m - endo_at(s.J2, pt).m).cwiseAbs().maxCoeff());
    r.cache_residual = std::max(r.cache_residual, c);
  }

  // The Courant twist of the pair is the background 3-form H - db (the
  // cached H is the full bihermitian torsion, which includes the b-exact
  // part).
  const TensorField twist = s.H - ext_d(s.b);
  r.nijenhuis_j1 = nijenhuis_norm(s.J1, &twist);
  r.nijenhuis_j2 = nijenhuis_norm(s.J2, &twist);
  return r;
}

TensorField potential_two_form(const GKState& s, const TensorField& u) {
  require(u.grid == s.grid && u.val.rank() == 0, "potential_two_form",
          "u must be a scalar field on the state's grid");
  return did(u, s.J);
}

TensorField exact_two_form(const GKState& s, const TensorField& a) {
  require(a.grid == s.grid && a.val.p == 1 && a.val.q == 0, "exact_two_form",
          "a must be a 1-form field on the state's grid");
  return ext_d(a);
}

GKState kaehler_torus(const TensorField& u) {
  const Grid& gr = u.grid;
  require(u.val.rank() == 0, "kaehler_torus", "potential must be a scalar field");
  const Mat I0 = standard_complex_structure(gr.n);
  TensorField I = constant_field(gr, endo_valence(), I0);

  TensorField omega = constant_field(gr, form_valence(2), Mat(I0.transpose()));
  omega += did(u, I);
  auto [g, margin] = metric_of_form(omega, I0);
  require(margin > 0.0, "kaehler_torus", "potential breaks metric positivity");

  TensorField b(gr, form_valence(2));
  return make_state(std::move(g), std::move(b), I, I);
}

GKState commuting_product(const TensorField& u_plus, const TensorField& u_minus) {
  const Grid& gr = u_plus.grid;
  require(gr.n == 2, "commuting_product", "needs T^4 = T^2 x T^2");
  require(u_minus.grid == gr, "commuting_product", "potentials on different grids");
  require(u_plus.val.rank() == 0 && u_minus.val.rank() == 0, "commuting_product",
          "potentials must be scalar fields");

  const Mat I0 = standard_complex_structure(2);
  Mat Jm = I0;
  Jm.block(2, 2, 2, 2) *= -1.0;  // J = (J_+, -J_-)
  TensorField I = constant_field(gr, endo_valence(), I0);
  TensorField J = constant_field(gr, endo_valence(), Jm);

  TensorField omega = constant_field(gr, form_valence(2), Mat(I0.transpose()));
  omega += did(u_plus, I);
  omega += did(u_minus, I);
  auto [g, margin] = metric_of_form(omega, I0);
  require(margin > 0.0, "commuting_product", "potentials break metric positivity");

  TensorField b(gr, form_valence(2));
  return make_state(std::move(g), std::move(b), I, J);
}

GKState hyperkaehler_t4(int N) {
  const Grid gr(2, N);
  const Mat Li = standard_complex_structure(2);
  Mat Lj = Mat::Zero(4, 4);  // left multiplication by j on (1, i, j, k)
  Lj(2, 0) = 1.0;
  Lj(3, 1) = -1.0;
  Lj(0, 2) = -1.0;
  Lj(1, 3) = 1.0;

  TensorField g = constant_field(gr, metric_valence(), Mat::Identity(4, 4));
  TensorField b(gr, form_valence(2));
  return make_state(std::move(g), std::move(b),
                    constant_field(gr, endo_valence(), Li),
                    constant_field(gr, endo_valence(), Lj));
}

namespace {

// Integration variables of the Hamiltonian deformation.
struct JoyceVars {
  TensorField J, Fp, Fm, b;

  void axpy(double s, const JoyceVars& o) {
    J += s * o.J;
    Fp += s * o.Fp;
    Fm += s * o.Fm;
    b += s * o.b;
  }
};

}  // namespace

GKState joyce_deform(const GKState& hk, const TensorField& u, double t_end,
                     double dt, JoyceDiagnostics* diag) {
  const Grid& gr = hk.grid;
  require(u.grid == gr && u.val.rank() == 0, "joyce_deform",
          "u must be a scalar field on the state's grid");
  require(dt > 0.0 && t_end >= 0.0, "joyce_deform", "need dt > 0, t_end >= 0");
  const int d = gr.dim();
  const std::size_t P = gr.npts();
  const Mat I0 = at_point(hk.I, 0);

  // Fixed Hamiltonian vector field X = sigma du.
  const TensorField du = ext_d(u);
  TensorField X(gr, vector_valence());
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c)
      muladd(X.comp(a), hk.sigma.comp(hk.sigma.cindex({a, c})), du.comp(c), P);

  // Initial F_pm and the fixed Omega = sigma^{-1}.
  JoyceVars y;
  y.J = hk.J;
  y.b = hk.b;
  y.Fp = TensorField(gr, form_valence(2));
  y.Fm = TensorField(gr, form_valence(2));
  TensorField Omega(gr, form_valence(2));
  for (std::size_t pt = 0; pt < P; ++pt) {
    const BihermData bh = biherm_at(hk, pt);
    const auto fp = bh.F_plus(), fm = bh.F_minus(), om = bh.Omega();
    require(fp && fm && om, "joyce_deform",
            "[I, J] must be invertible (nondegenerate scenario required)");
    set_point(y.Fp, pt, fp->transpose());
    set_point(y.Fm, pt, fm->transpose());
    set_point(Omega, pt, om->transpose());
  }

  const auto rhs = [&](const JoyceVars& v) {
    JoyceVars k;
    k.J = lie(X, v.J);
    k.Fp = did(u, v.J);
    k.Fm = k.Fp;
    k.b = half_anticommutator(k.Fp, I0);
    return k;
  };

  // Metric recovery g = -1/2 F_+ (I + J); returns positivity margin, the
  // F_- cross-check gap, and the sigma-route gap g - 1/2 Omega [I, J].
  TensorField g_now = hk.g;
  const auto recover = [&](const JoyceVars& v, double& margin, double& cross,
                           double& srec) {
    TensorField g(gr, metric_valence());
    margin = std::numeric_limits<double>::infinity();
    cross = 0.0;
    srec = 0.0;
    for (std::size_t pt = 0; pt < P; ++pt) {
      const Mat Jm = at_point(v.J, pt);
      const Mat gp = -0.5 * at_point(v.Fp, pt).transpose() * (I0 + Jm);
      const Mat gm = -0.5 * at_point(v.Fm, pt).transpose() * (I0 - Jm);
      const Mat gs = 0.5 * at_point(Omega, pt).transpose() * (I0 * Jm - Jm * I0);
      cross = std::max(cross, (gp - gm).cwiseAbs().maxCoeff());
      srec = std::max(srec, (gp - gs).cwiseAbs().maxCoeff());
      const Mat sym = 0.5 * (gp + gp.transpose());
      margin = std::min(margin, min_eig(sym));
      set_point(g, pt, sym);
    }
    g_now = std::move(g);
    return margin > 0.0;
  };

  const int nsteps = std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-12)));
  const double h = t_end / nsteps;
  double t = 0.0;
  double cross = 0.0, srec = 0.0;
  JoyceVars good = y;
  TensorField g_good = g_now;
  if (diag != nullptr) *diag = JoyceDiagnostics{};

  for (int s = 0; t_end > 0.0 && s < nsteps; ++s) {
    const JoyceVars k1 = rhs(y);
    JoyceVars y2 = y;
    y2.axpy(0.5 * h, k1);
    const JoyceVars k2 = rhs(y2);
    JoyceVars y3 = y;
    y3.axpy(0.5 * h, k2);
    const JoyceVars k3 = rhs(y3);
    JoyceVars y4 = y;
    y4.axpy(h, k3);
    const JoyceVars k4 = rhs(y4);
    y.axpy(h / 6.0, k1);
    y.axpy(h / 3.0, k2);
    y.axpy(h / 3.0, k3);
    y.axpy(h / 6.0, k4);

    double margin = 0.0;
    const bool ok = recover(y, margin, cross, srec);
    const double scale = 1.0 + g_good.max_abs();
    if (!ok || cross > 1e-6 * scale) {
      if (diag != nullptr) {
        diag->completed = false;
        diag->t_reached = t;
        diag->f_cross_residual = cross;
        diag->sigma_recovery_residual = srec;
        GKState out = make_state(g_good, good.b, hk.I, good.J);
        diag->sigma_drift = (out.sigma - hk.sigma).max_abs();
        return out;
      }
      require(ok, "joyce_deform", "metric positivity lost during the flow");
      require(false, "joyce_deform", "F_+ / F_- metric recoveries disagree");
    }
    t += h;
    good = y;
    g_good = g_now;
  }

  GKState out = make_state(g_good, good.b, hk.I, good.J);
  if (diag != nullptr) {
    diag->t_reached = t;
    diag->completed = true;
    diag->f_cross_residual = cross;
    diag->sigma_recovery_residual = srec;
    diag->sigma_drift = (out.sigma - hk.sigma).max_abs();
  }
  return out;
}

}  // namespace gk
