#include "gk/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gk {
namespace {

// J' = kLeeSign * L_{1/2 (theta_I - theta_J)^sharp} J in the bihermitian
// Ricci-flow formulation.  The sign is pinned by the requirement that the
// Lee-form transport reproduce the canonical right-hand side sigma(-rho_I)
// (measured on the deformed-hyperkähler scenario; see the flows tests).
constexpr double kLeeSign = 1.0;

struct Vars {
  TensorField g, b, J;

  void axpy(double s, const Vars& o) {
    g += s * o.g;
    b += s * o.b;
    J += s * o.J;
  }
};

enum class JMode { algebraic, lee_transport };

double min_eig(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

TensorField eval_k(const Vars& y, const TensorField& I, const FlowConfig& cfg,
                   const TensorField& exact_K) {
  switch (cfg.k_source) {
    case KSource::potential:
      return did(cfg.u, y.J);
    case KSource::exact:
      return exact_K;
    case KSource::bismut_ricci: {
      TensorField K = bismut_ricci(y.g, I).rho;
      K *= -1.0;
      return K;
    }
  }
  require(false, "eval_k", "unknown K source");
  return exact_K;
}

double is11_defect(const TensorField& Karr, const TensorField& J) {
  double worst = 0.0;
  for (std::size_t pt = 0; pt < Karr.grid.npts(); ++pt) {
    const Mat Km = at_point(Karr, pt).transpose();
    const Mat Jm = at_point(J, pt);
    worst = std::max(worst,
                     (Km * Jm + Jm.transpose() * Km).cwiseAbs().maxCoeff());
  }
  return worst;
}

Vars rhs(const Vars& y, const TensorField& I, const FlowConfig& cfg,
         const TensorField& exact_K, JMode mode,
         const TensorField* precomputed_K) {
  const Grid& gr = y.g.grid;
  const TensorField K =
      precomputed_K != nullptr ? *precomputed_K : eval_k(y, I, cfg, exact_K);

  Vars k;
  k.g = TensorField(gr, metric_valence());
  k.b = TensorField(gr, form_valence(2));
  k.J = TensorField(gr, endo_valence());
  const bool algebraic = mode == JMode::algebraic;
  for (std::size_t pt = 0; pt < gr.npts(); ++pt) {
    const Mat Km = at_point(K, pt).transpose();
    const Mat Im = at_point(I, pt);
    const Mat IK = Im.transpose() * Km;
    const Mat KI = Km * Im;
    set_point(k.g, pt, -0.5 * (KI - IK));
    set_point(k.b, pt, Mat((-0.5 * (KI + IK)).transpose()));
    if (algebraic) {
      const Mat Jm = at_point(y.J, pt);
      const Mat gm = at_point(y.g, pt);
      set_point(k.J, pt, 0.5 * (Im * Jm - Jm * Im) * gm.inverse() * Km);
    }
  }
  if (!algebraic) {
    TensorField diff = lee_form(y.g, I);
    diff -= lee_form(y.g, y.J);
    diff *= 0.5 * kLeeSign;
    k.J = lie(sharp(diff, y.g), y.J);
  }
  return k;
}

void advance(Vars& y, double dt, const TensorField& I, const FlowConfig& cfg,
             const TensorField& exact_K, JMode mode, const TensorField& K0) {
  if (cfg.integrator == Integrator::euler) {
    const Vars k1 = rhs(y, I, cfg, exact_K, mode, &K0);
    y.axpy(dt, k1);
    return;
  }
  const Vars k1 = rhs(y, I, cfg, exact_K, mode, &K0);
  Vars y2 = y;
  y2.axpy(0.5 * dt, k1);
  const Vars k2 = rhs(y2, I, cfg, exact_K, mode, nullptr);
  Vars y3 = y;
  y3.axpy(0.5 * dt, k2);
  const Vars k3 = rhs(y3, I, cfg, exact_K, mode, nullptr);
  Vars y4 = y;
  y4.axpy(dt, k3);
  const Vars k4 = rhs(y4, I, cfg, exact_K, mode, nullptr);
  y.axpy(dt / 6.0, k1);
  y.axpy(dt / 3.0, k2);
  y.axpy(dt / 3.0, k3);
  y.axpy(dt / 6.0, k4);
}

FlowResult run_flow(const GKState& s0, const FlowConfig& cfg, JMode mode) {
  require(cfg.dt > 0.0 && cfg.steps >= 1, "flow", "need dt > 0 and steps >= 1");
  const Grid& gr = s0.grid;
  if (cfg.k_source == KSource::potential)
    require(cfg.u.grid == gr && cfg.u.val.rank() == 0, "flow",
            "potential source needs a scalar field u on the state's grid");
  TensorField exact_K;
  if (cfg.k_source == KSource::exact) {
    require(cfg.a.grid == gr && cfg.a.val.p == 1 && cfg.a.val.q == 0, "flow",
            "exact source needs a 1-form field a on the state's grid");
    exact_K = ext_d(cfg.a);
  }
  const TensorField& I = s0.I;

  FlowRecord rec;
  rec.columns = {"t",       "k_norm",      "dk_residual",
                 "is11_residual", "i_drift", "sigma_drift",
                 "positivity_margin", "j1_step_residual", "j2_step_residual"};
  const int every =
      cfg.certify_every > 0 ? cfg.certify_every : std::max(1, (cfg.steps + 9) / 10);
  rec.certifications.emplace_back(0.0, certify(s0));

  Vars y{s0.g, s0.b, s0.J};
  Vars good = y;
  double t = 0.0;
  double t_good = 0.0;
  bool positive = true;  // s0 was assembled, hence positive

  for (int s = 0; s < cfg.steps; ++s) {
    const TensorField K0 = eval_k(y, I, cfg, exact_K);
    const double knorm = K0.max_abs();
    const double dk = ext_d(K0).max_abs();
    const double is11 = is11_defect(K0, y.J);
    if (dk > cfg.k_tol) {
      rec.completed = false;
      rec.abort_reason = "deformation form is not closed";
      break;
    }
    if (is11 > cfg.k_tol) {
      rec.completed = false;
      rec.abort_reason = "deformation form is not (1,1) for the current J";
      break;
    }
    if (cfg.k_source == KSource::bismut_ricci &&
        knorm * cfg.dt > cfg.rho_step_budget) {
      rec.completed = false;
      rec.abort_reason = "curvature step budget exceeded";
      break;
    }

    const Vars prev = y;
    const bool prev_positive = positive;
    advance(y, cfg.dt, I, cfg, exact_K, mode, K0);
    t += cfg.dt;

    // Cheap invariants first: positivity and the conserved quantities.
    double margin = std::numeric_limits<double>::infinity();
    double sdrift = 0.0;
    for (std::size_t pt = 0; pt < gr.npts(); ++pt) {
      const Mat gm = at_point(y.g, pt);
      margin = std::min(margin, min_eig(gm));
      const Mat Im = at_point(I, pt);
      const Mat Jm = at_point(y.J, pt);
      const Mat sig = 0.5 * (Im * Jm - Jm * Im) * gm.inverse();
      sdrift = std::max(
          sdrift, (sig - at_point(s0.sigma, pt)).cwiseAbs().maxCoeff());
    }
    const double idrift = 0.0;  // I is held fixed structurally
    positive = margin > 0.0;

    // Per-step cross-check against the generalized evolution equation:
    // Delta J_i should equal dt * Phi_K(J_i) to O(dt^2).  Only meaningful
    // between states on which the generalized pair exists.
    double j1res = std::numeric_limits<double>::quiet_NaN();
    double j2res = j1res;
    if (positive && prev_positive) {
      j1res = j2res = 0.0;
      for (std::size_t pt = 0; pt < gr.npts(); ++pt) {
        BihermData bp;
        bp.g = at_point(prev.g, pt);
        bp.b = at_point(prev.b, pt).transpose();
        bp.I = at_point(I, pt);
        bp.J = at_point(prev.J, pt);
        BihermData bn;
        bn.g = at_point(y.g, pt);
        bn.b = at_point(y.b, pt).transpose();
        bn.I = bp.I;
        bn.J = at_point(y.J, pt);
        const auto [j1p, j2p] = gualtieri_map(bp, kAssemblyTol);
        const auto [j1n, j2n] = gualtieri_map(bn, kAssemblyTol);
        const TwoForm Kf(at_point(K0, pt).transpose());
        const GenEndo f1 = phi_k(j1p, Kf, kAssemblyTol);
        const GenEndo f2 = phi_k(j2p, Kf, kAssemblyTol);
        j1res = std::max(
            j1res, (j1n.m - j1p.m - cfg.dt * f1.m).cwiseAbs().maxCoeff());
        j2res = std::max(
            j2res, (j2n.m - j2p.m - cfg.dt * f2.m).cwiseAbs().maxCoeff());
      }
    }

    rec.rows.push_back(
        {t, knorm, dk, is11, idrift, sdrift, margin, j1res, j2res});

    if (!positive && cfg.abort_on_positivity) {
      rec.completed = false;
      rec.abort_reason = "metric positivity lost";
      break;
    }
    if (positive) {
      good = y;
      t_good = t;
      if ((s + 1) % every == 0 && s + 1 < cfg.steps)
        rec.certifications.emplace_back(
            t, certify(make_state(y.g, y.b, I, y.J)));
    }
  }

  // With abort_on_positivity unset the record runs to the configured end,
  // but the returned (certifiable) state is the last one with positive
  // metric.
  if (!positive) {
    rec.completed = false;
    if (rec.abort_reason.empty())
      rec.abort_reason = "metric positivity lost (recording continued)";
  }
  rec.t_final = t_good;
  GKState out = make_state(good.g, good.b, I, good.J);
  rec.certifications.emplace_back(t_good, certify(out));
  return {std::move(out), std::move(rec)};
}

}  // namespace

double FlowRecord::last(const std::string& column) const {
  require(!rows.empty(), "FlowRecord", "no rows recorded");
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column) return rows.back()[i];
  require(false, "FlowRecord", "unknown column");
  return 0.0;
}

double FlowRecord::max(const std::string& column) const {
  require(!rows.empty(), "FlowRecord", "no rows recorded");
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column) {
      double m = -std::numeric_limits<double>::infinity();
      for (const auto& r : rows)
        if (!std::isnan(r[i])) m = std::max(m, r[i]);
      return m;
    }
  require(false, "FlowRecord", "unknown column");
  return 0.0;
}

FlowResult canonical_flow(const GKState& s0, const FlowConfig& cfg) {
  return run_flow(s0, cfg, JMode::algebraic);
}

FlowResult gkrf_biherm(const GKState& s0, const FlowConfig& cfg) {
  FlowConfig c = cfg;
  c.k_source = KSource::bismut_ricci;
  return run_flow(s0, c, JMode::lee_transport);
}

FlowResult gkrf_generalized(const GKState& s0, const FlowConfig& cfg) {
  FlowConfig c = cfg;
  c.k_source = KSource::bismut_ricci;
  return run_flow(s0, c, JMode::algebraic);
}

double state_distance(const GKState& x, const GKState& y) {
  return std::max({(x.g - y.g).max_abs(), (x.b - y.b).max_abs(),
                   (x.I - y.I).max_abs(), (x.J - y.J).max_abs()});
}

}  // namespace gk
