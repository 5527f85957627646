// Identity harness: named residual checks for the structural statements the
// library is built on, plus report emission.  Compositions that required
// numerical sign/variant calibration carry their resolved convention in the
// result notes and in docs/conventions.md.

#include "gk/verify.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>

namespace gk {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Complexified-section helpers (real/imaginary parts stored separately).

CGenVectorField promote(const GenVectorField& v) {
  CGenVectorField out(v.X.grid);
  out.re = v;
  return out;
}

// acc += (re + i im) * v
void axpy(CGenVectorField& acc, double re, double im, const CGenVectorField& v) {
  auto add = [](TensorField& a, const TensorField& x, double c) {
    if (c == 0.0) return;
    for (std::size_t k = 0; k < a.ncomp(); ++k)
      for (std::size_t t = 0; t < a.npts(); ++t) a.comp(k)[t] += c * x.comp(k)[t];
  };
  add(acc.re.X, v.re.X, re);   add(acc.re.xi, v.re.xi, re);
  add(acc.im.X, v.im.X, re);   add(acc.im.xi, v.im.xi, re);
  add(acc.re.X, v.im.X, -im);  add(acc.re.xi, v.im.xi, -im);
  add(acc.im.X, v.re.X, im);   add(acc.im.xi, v.re.xi, im);
}

CGenVectorField bshear_c(const TensorField& K, const CGenVectorField& v) {
  CGenVectorField out(K.grid);
  out.re = b_shear(K, v.re);
  out.im = b_shear(K, v.im);
  return out;
}

// Constant section with complex frame coefficients c (stacked T, T* order).
CGenVectorField combo_section(const Grid& g, const CVec& c) {
  CGenVectorField v(g);
  const int d = g.dim();
  for (int k = 0; k < 2 * d; ++k) {
    TensorField& re = k < d ? v.re.X : v.re.xi;
    TensorField& im = k < d ? v.im.X : v.im.xi;
    const int slot = k < d ? k : k - d;
    std::fill(re.comp(slot), re.comp(slot) + re.npts(), c(k).real());
    std::fill(im.comp(slot), im.comp(slot) + im.npts(), c(k).imag());
  }
  return v;
}

// Seeded unit-normalized complex frame-combination coefficients.
std::vector<CVec> draw_combos(int count, int gen_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4full);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<CVec> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    CVec c(gen_dim);
    double norm2 = 0.0;
    for (int j = 0; j < gen_dim; ++j) {
      const double re = U(rng), im = U(rng);
      c(j) = cplx(re, im);
      norm2 += re * re + im * im;
    }
    c /= std::sqrt(norm2);
    out.push_back(c);
  }
  return out;
}

Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

// Pointwise value dK(u, v, .) for complex tangent vectors, as a covector.
CVec dk_contract(const TensorField& dK, std::size_t pt, const CVec& u,
                 const CVec& v) {
  const int d = dK.grid.dim();
  CVec w(d);
  for (int c = 0; c < d; ++c) {
    cplx acc = 0.0;
    for (int i = 0; i < d; ++i) {
      if (u(i) == 0.0) continue;
      for (int j = 0; j < d; ++j)
        acc += dK.comp(dK.cindex({i, j, c}))[pt] * u(i) * v(j);
    }
    w(c) = acc;
  }
  return w;
}

}  // namespace

CheckResult make_result(std::string name, double residual, double tolerance,
                        CheckContext ctx) {
  CheckResult r;
  r.name = std::move(name);
  r.residual = residual;
  r.tolerance = tolerance;
  r.pass = residual <= tolerance;
  r.context = std::move(ctx);
  return r;
}

// ---------------------------------------------------------------------------
// Random band-limited fields.

namespace {

// One trig component: coefficients for sin x_i, cos x_i (i < dim) and
// sin(x_i + x_{i+1 mod dim}); harmonics never exceed 2.
struct TrigComp {
  std::vector<double> cs, cc, cp;
};

TrigComp draw_trig(std::mt19937_64& rng, int dim, double amplitude) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  TrigComp t;
  t.cs.resize(dim);
  t.cc.resize(dim);
  t.cp.resize(dim);
  const double scale = amplitude / (3.0 * dim);
  for (int i = 0; i < dim; ++i) t.cs[i] = scale * U(rng);
  for (int i = 0; i < dim; ++i) t.cc[i] = scale * U(rng);
  for (int i = 0; i < dim; ++i) t.cp[i] = scale * U(rng);
  return t;
}

double eval_trig(const TrigComp& t, const Vec& x) {
  double v = 0.0;
  const int dim = static_cast<int>(t.cs.size());
  for (int i = 0; i < dim; ++i) {
    v += t.cs[i] * std::sin(x(i)) + t.cc[i] * std::cos(x(i));
    v += t.cp[i] * std::sin(x(i) + x((i + 1) % dim));
  }
  return v;
}

}  // namespace

TensorField random_two_form_field(const Grid& g, std::uint64_t seed,
                                  double amplitude) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const int d = g.dim();
  std::vector<TrigComp> comps(static_cast<std::size_t>(d) * d);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      comps[static_cast<std::size_t>(a) * d + b] = draw_trig(rng, d, amplitude);
  return sample_field(g, form_valence(2),
                      [d, &comps](const Vec& x, const std::vector<int>& i) {
                        const int a = i[0], b = i[1];
                        if (a == b) return 0.0;
                        const int lo = std::min(a, b), hi = std::max(a, b);
                        const double v =
                            eval_trig(comps[static_cast<std::size_t>(lo) * d + hi], x);
                        return a < b ? v : -v;
                      });
}

TensorField random_11_two_form_field(const GKState& s, std::uint64_t seed,
                                     double amplitude) {
  TensorField K = random_two_form_field(s.grid, seed, amplitude);
  TensorField out(s.grid, form_valence(2));
  for (std::size_t t = 0; t < K.npts(); ++t) {
    const Mat J = at_point(s.J, t);
    const Mat k = at_point(K, t);
    set_point(out, t, 0.5 * (k + J.transpose() * k * J));
  }
  return out;
}

TensorField random_scalar_field(const Grid& g, std::uint64_t seed,
                                double amplitude) {
  std::mt19937_64 rng(seed ^ 0xa0761d6478bd642full);
  TrigComp t = draw_trig(rng, g.dim(), amplitude);
  return scalar_field(g, [&t](const Vec& x) { return eval_trig(t, x); });
}

TensorField random_one_form_field(const Grid& g, std::uint64_t seed,
                                  double amplitude) {
  std::mt19937_64 rng(seed ^ 0xe7037ed1a0b428dbull);
  const int d = g.dim();
  std::vector<TrigComp> comps;
  comps.reserve(d);
  for (int a = 0; a < d; ++a) comps.push_back(draw_trig(rng, d, amplitude));
  return sample_field(g, form_valence(1),
                      [&comps](const Vec& x, const std::vector<int>& i) {
                        return eval_trig(comps[static_cast<std::size_t>(i[0])], x);
                      });
}

// ---------------------------------------------------------------------------
// Partial integrability.

double PartialConditions::worst() const {
  return std::max({j1_main, j1_conj, j2_main, j2_conj});
}

PartialConditions partial_integrability_residuals(const GKState& s,
                                                  const TensorField& K,
                                                  std::uint64_t seed,
                                                  std::size_t stride) {
  require(K.grid == s.grid, "partial_integrability_residuals",
          "K lives on a different grid");
  if (stride == 0) stride = 1;
  const int d = s.grid.dim();
  const TensorField dK = ext_d(K);
  const std::vector<CVec> combos = draw_combos(8, 2 * d, seed);
  PartialConditions out;

  // pair list: all frame pairs, then fixed combo pairs
  std::vector<std::pair<int, int>> fpairs;
  for (int a = 0; a < 2 * d; ++a)
    for (int b = a + 1; b < 2 * d; ++b) fpairs.emplace_back(a, b);
  const std::pair<int, int> cpairs[] = {{0, 1}, {2, 3}, {4, 5}, {6, 7},
                                        {0, 4}, {1, 5}, {2, 6}, {3, 7}};

  const CMat id = CMat::Identity(2 * d, 2 * d);
  for (std::size_t pt = 0; pt < s.grid.npts(); pt += stride) {
    for (int which = 0; which < 2; ++which) {
      const CMat Jm = endo_at(which == 0 ? s.J1 : s.J2, pt).m.cast<cplx>();
      const CMat P10 = 0.5 * (id - cplx(0, 1) * Jm);
      const CMat P01 = 0.5 * (id + cplx(0, 1) * Jm);
      double rmain = 0.0, rconj = 0.0;
      auto eval_pair = [&](const CVec& x, const CVec& y) {
        for (int pass = 0; pass < 2; ++pass) {
          const CMat& P = pass == 0 ? P10 : P01;
          const CVec Xu = (P * x).head(d);
          const CVec Yv = (P * y).head(d);
          CVec z = CVec::Zero(2 * d);
          z.tail(d) = dk_contract(dK, pt, Yv, Xu);
          const double r = (P01 * z).cwiseAbs().maxCoeff();
          (pass == 0 ? rmain : rconj) = std::max(pass == 0 ? rmain : rconj, r);
        }
      };
      for (const auto& [a, b] : fpairs) {
        CVec x = CVec::Zero(2 * d), y = CVec::Zero(2 * d);
        x(a) = 1.0;
        y(b) = 1.0;
        eval_pair(x, y);
      }
      for (const auto& [a, b] : cpairs) eval_pair(combos[a], combos[b]);
      if (which == 0) {
        out.j1_main = std::max(out.j1_main, rmain);
        out.j1_conj = std::max(out.j1_conj, rconj);
      } else {
        out.j2_main = std::max(out.j2_main, rmain);
        out.j2_conj = std::max(out.j2_conj, rconj);
      }
    }
  }
  return out;
}

CheckResult check_partial_integrability(const GKState& s, const TensorField& K,
                                        double tol, std::uint64_t seed) {
  PartialConditions pc = partial_integrability_residuals(s, K, seed);
  CheckContext ctx;
  ctx.grid_points = s.grid.N;
  ctx.seed = seed;
  ctx.notes = fmt("j1 main %.3e conj %.3e; j2 main %.3e conj %.3e; |dK| %.3e",
                  pc.j1_main, pc.j1_conj, pc.j2_main, pc.j2_conj,
                  ext_d(K).max_abs());
  return make_result("partial_integrability", pc.worst(), tol, std::move(ctx));
}

// ---------------------------------------------------------------------------
// Nijenhuis variation.

CheckResult check_nijenhuis_variation(const GKState& s, const TensorField& K,
                                      double h, double tol, std::uint64_t seed) {
  require(h > 0.0, "check_nijenhuis_variation", "step must be positive");
  {
    CertifyReport cert = certify(s);
    require(cert.pass(kCertifiedTol), "check_nijenhuis_variation",
            "state does not certify");
  }
  const int d = s.grid.dim();
  TensorField twist = s.H;
  twist -= ext_d(s.b);
  const TensorField dK = ext_d(K);
  const std::vector<CVec> combos = draw_combos(4, 2 * d, seed);

  // sampled pairs: disjoint frame pairs plus two complex combinations
  std::vector<std::pair<CGenVectorField, CGenVectorField>> pairs;
  for (int i = 0; 2 * i + 1 < 2 * d && i < 4; ++i)
    pairs.emplace_back(promote(frame_section(s.grid, 2 * i)),
                       promote(frame_section(s.grid, 2 * i + 1)));
  pairs.emplace_back(combo_section(s.grid, combos[0]),
                     combo_section(s.grid, combos[1]));
  pairs.emplace_back(combo_section(s.grid, combos[2]),
                     combo_section(s.grid, combos[3]));

  double worst = 0.0, scale = 0.0;
  double per_structure[2] = {0.0, 0.0};
  for (int which = 0; which < 2; ++which) {
    const GenEndoField& Jf = which == 0 ? s.J1 : s.J2;

    GenEndoField phi(s.grid), Jp(s.grid), Jm(s.grid);
    for (std::size_t t = 0; t < s.grid.npts(); ++t) {
      const GenEndo j = endo_at(Jf, t);
      const GenEndo p =
          phi_k(j, TwoForm(at_point(K, t).transpose(), kAssemblyTol), kAssemblyTol);
      set_endo(phi, t, p);
      set_endo(Jp, t, GenEndo(j.m + h * p.m, j.d));
      set_endo(Jm, t, GenEndo(j.m - h * p.m, j.d));
    }

    for (const auto& [x, y] : pairs) {
      // centered difference of N along the shifted structures
      CGenVectorField fd(s.grid);
      {
        CGenVectorField np = nijenhuis_pair(Jp, &twist, x, y);
        CGenVectorField nm = nijenhuis_pair(Jm, &twist, x, y);
        axpy(np, -1.0, 0.0, nm);
        axpy(fd, 1.0 / (2.0 * h), 0.0, np);
      }

      CGenVectorField rhs(s.grid);
      // i pi01( dK(pi_T pi10 y, pi_T pi10 x, .) )
      {
        CGenVectorField z(s.grid);
        const CMat id = CMat::Identity(2 * d, 2 * d);
        for (std::size_t t = 0; t < s.grid.npts(); ++t) {
          const CMat Jmat = endo_at(Jf, t).m.cast<cplx>();
          const CMat P10 = 0.5 * (id - cplx(0, 1) * Jmat);
          CVec xv(2 * d), yv(2 * d);
          for (int k = 0; k < d; ++k) {
            xv(k) = cplx(x.re.X.comp(k)[t], x.im.X.comp(k)[t]);
            xv(d + k) = cplx(x.re.xi.comp(k)[t], x.im.xi.comp(k)[t]);
            yv(k) = cplx(y.re.X.comp(k)[t], y.im.X.comp(k)[t]);
            yv(d + k) = cplx(y.re.xi.comp(k)[t], y.im.xi.comp(k)[t]);
          }
          const CVec w =
              dk_contract(dK, t, (P10 * yv).head(d), (P10 * xv).head(d));
          for (int c = 0; c < d; ++c) {
            z.re.xi.comp(c)[t] = w(c).real();
            z.im.xi.comp(c)[t] = w(c).imag();
          }
        }
        CGenVectorField jz = apply_endo(Jf, z);
        CGenVectorField p(s.grid);
        axpy(p, 0.5, 0.0, z);
        axpy(p, 0.0, 0.5, jz);  // pi01 z = (z + i J z)/2
        axpy(rhs, 0.0, 1.0, p);
      }
      const CGenVectorField n0 = nijenhuis_pair(Jf, &twist, x, y);
      axpy(rhs, 0.0, -1.0, n0);                            // - i N
      axpy(rhs, 1.0, 0.0, apply_endo(Jf, bshear_c(K, n0)));  // J e^K N
      {
        CGenVectorField t4 =
            nijenhuis_pair(Jf, &twist, bshear_c(K, apply_endo(Jf, x)), y);
        axpy(rhs, 1.0, 0.0, t4);  // N(e^K J x, y)
      }
      {
        CGenVectorField t5 =
            nijenhuis_pair(Jf, &twist, x, bshear_c(K, apply_endo(Jf, y)));
        axpy(rhs, 1.0, 0.0, t5);  // N(x, e^K J y)
      }
      axpy(rhs, -1.0, 0.0, fd);
      const double r = max_abs(rhs);
      worst = std::max(worst, r);
      per_structure[which] = std::max(per_structure[which], r);
      scale = std::max(scale, max_abs(fd));
    }
  }
  CheckContext ctx;
  ctx.grid_points = s.grid.N;
  ctx.seed = seed;
  ctx.notes = fmt("h %.3e; j1 %.3e j2 %.3e; fd scale %.3e; %zu pairs/structure",
                  h, per_structure[0], per_structure[1], scale, pairs.size());
  return make_result("nijenhuis_variation", worst, tol, std::move(ctx));
}

// ---------------------------------------------------------------------------
// Compatibility equivalence.

namespace {

// Three-way classification with a decision margin; nullopt = ambiguous.
std::optional<bool> classify(double r, double tol, double fail_margin) {
  if (r <= tol) return true;
  if (r >= fail_margin) return false;
  return std::nullopt;
}

}  // namespace

CheckResult check_compatibility_equivalence(const GKState& s, int samples,
                                            std::uint64_t seed, double tol,
                                            double fail_margin) {
  require(samples >= 1, "check_compatibility_equivalence",
          "need at least one sample");
  require(fail_margin > tol, "check_compatibility_equivalence",
          "failure margin must exceed the tolerance");
  const std::size_t stride =
      std::max<std::size_t>(1, s.grid.npts() / 2048);

  double violation = 0.0;
  int redraws = 0, agree_pass = 0, agree_fail = 0;
  for (int i = 0; i < samples; ++i) {
    std::uint64_t draw_seed = seed * 1000003ull + static_cast<std::uint64_t>(i);
    for (int attempt = 0;; ++attempt) {
      TensorField K =
          i == 0 ? s.omega_J
          : i % 2 == 0 ? random_11_two_form_field(s, draw_seed)
                       : random_two_form_field(s.grid, draw_seed);
      double A = 0.0, B = 0.0;
      for (std::size_t pt = i % stride; pt < s.grid.npts(); pt += stride) {
        const Mat Km = at_point(K, pt).transpose();
        const Mat J = at_point(s.J, pt);
        const GenEndo j1 = endo_at(s.J1, pt), j2 = endo_at(s.J2, pt);
        const TwoForm tf(Km, kAssemblyTol);
        const GenEndo p1 = phi_k(j1, tf, kAssemblyTol);
        const GenEndo p2 = phi_k(j2, tf, kAssemblyTol);
        A = std::max(A, (comm(p1.m, j2.m) - comm(p2.m, j1.m)).cwiseAbs().maxCoeff());
        B = std::max(B, (Km * J + J.transpose() * Km).cwiseAbs().maxCoeff());
      }
      const std::optional<bool> ca = classify(A, tol, fail_margin);
      const std::optional<bool> cb = classify(B, tol, fail_margin);
      if (ca && cb) {
        if (*ca != *cb) violation = std::max(violation, std::max(A, B));
        else if (*ca) ++agree_pass;
        else ++agree_fail;
        break;
      }
      ++redraws;
      draw_seed = draw_seed * 6364136223846793005ull + 1442695040888963407ull;
      if (attempt >= 16) {
        // persistent borderline counts as a violation at its own size
        violation = std::max(violation, std::max(A, B));
        break;
      }
    }
  }
  CheckContext ctx;
  ctx.grid_points = s.grid.N;
  ctx.seed = seed;
  ctx.notes = fmt("samples %d; both-pass %d both-fail %d redraws %d; "
                  "margin %.1e/%.1e",
                  samples, agree_pass, agree_fail, redraws, tol, fail_margin);
  return make_result("compatibility_equivalence", violation, tol,
                     std::move(ctx));
}

// ---------------------------------------------------------------------------
// dK equivalence.

CheckResult check_dk_equivalence(const GKState& s, int samples,
                                 std::uint64_t seed, double tol,
                                 double fail_margin) {
  require(samples >= 1, "check_dk_equivalence", "need at least one sample");
  require(fail_margin > tol, "check_dk_equivalence",
          "failure margin must exceed the tolerance");
  const int d = s.grid.dim();
  const std::size_t pt_stride =
      std::max<std::size_t>(1, s.grid.npts() / 4096);

  double violation = 0.0;
  int redraws = 0, agree_pass = 0, agree_fail = 0;
  for (int i = 0; i < samples; ++i) {
    std::uint64_t draw_seed = seed * 1000003ull + static_cast<std::uint64_t>(i);
    for (int attempt = 0;; ++attempt) {
      TensorField K;
      switch (i % 3) {
        case 0:
          K = potential_two_form(s, random_scalar_field(s.grid, draw_seed));
          break;
        case 1:
          K = exact_two_form(s, random_one_form_field(s.grid, draw_seed));
          break;
        default:
          K = random_two_form_field(s.grid, draw_seed);
      }
      const double P =
          partial_integrability_residuals(s, K, seed, pt_stride).worst();
      const double Q = ext_d(K).max_abs();
      const std::optional<bool> cp = classify(P, tol, fail_margin);
      const std::optional<bool> cq = classify(Q, tol, fail_margin);
      if (cp && cq) {
        if (*cp != *cq) violation = std::max(violation, std::max(P, Q));
        else if (*cp) ++agree_pass;
        else ++agree_fail;
        break;
      }
      ++redraws;
      draw_seed = draw_seed * 6364136223846793005ull + 1442695040888963407ull;
      if (attempt >= 16) {
        violation = std::max(violation, std::max(P, Q));
        break;
      }
    }
  }

  // Proof-mechanism sub-checks on the state itself.
  double lift_res = 0.0, kernel_margin = std::numeric_limits<double>::infinity();
  const std::size_t sub_stride = std::max<std::size_t>(1, s.grid.npts() / 512);
  for (std::size_t pt = 0; pt < s.grid.npts(); pt += sub_stride) {
    const BihermData bh = biherm_at(s, pt);
    const auto [p10_1, p01_1] = projectors(endo_at(s.J1, pt));
    const auto [p10_2, p01_2] = projectors(endo_at(s.J2, pt));
    for (int k = 0; k < d; ++k) {
      // X - i I X spans T^{1,0}_I; its C+ lift must lie in L1 and L2
      CVec Xc = CVec::Zero(d);
      Xc(k) = 1.0;
      Xc -= cplx(0, 1) * bh.I.col(k).cast<cplx>();
      const CGenVector lift = c_plus_lift(bh, Xc);
      lift_res = std::max(lift_res,
                          (p01_1.m * lift.stacked()).cwiseAbs().maxCoeff());
      lift_res = std::max(lift_res,
                          (p01_2.m * lift.stacked()).cwiseAbs().maxCoeff());
    }
    const Mat wIinv = bh.omega_I().inverse(), wJinv = bh.omega_J().inverse();
    Mat stack(2 * d, d);
    stack.topRows(d) = wIinv - wJinv;
    stack.bottomRows(d) = wIinv + wJinv;
    Eigen::JacobiSVD<Mat> svd(stack);
    kernel_margin = std::min(kernel_margin, svd.singularValues().minCoeff());
  }
  require(kernel_margin > 1e-12, "check_dk_equivalence",
          "covector-vanishing mechanism degenerate (kernel margin ~ 0)");

  CheckContext ctx;
  ctx.grid_points = s.grid.N;
  ctx.seed = seed;
  ctx.notes = fmt("samples %d; both-pass %d both-fail %d redraws %d; "
                  "lift residual %.3e; kernel margin %.3e",
                  samples, agree_pass, agree_fail, redraws, lift_res,
                  kernel_margin);
  return make_result("dk_equivalence", std::max(violation, lift_res), tol,
                     std::move(ctx));
}

// ---------------------------------------------------------------------------
// Variation formulas.

CheckResult check_variation_formulas(const GKState& s, const TensorField& K,
                                     double h, double tol) {
  require(h > 0.0, "check_variation_formulas", "step must be positive");
  const double kscale = 1.0 + K.max_abs();
  require(ext_d(K).max_abs() <= 1e-6 * kscale, "check_variation_formulas",
          "K is not closed");
  if (tol <= 0.0) tol = h;

  const std::size_t stride = std::max<std::size_t>(1, s.grid.npts() / 4096);
  double rg = 0.0, rb = 0.0, ri = 0.0, rj = 0.0, rwi = 0.0, rwj = 0.0;
  for (std::size_t pt = 0; pt < s.grid.npts(); pt += stride) {
    const BihermData bh = biherm_at(s, pt);
    const TwoForm tf(at_point(K, pt).transpose(), kAssemblyTol);
    require(is_11(tf, bh.J, 1e-6).ok, "check_variation_formulas",
            "K is not (1,1) for the state's J");
    const Variation var = induced_variation(bh, tf, 1e-6);
    const GenEndo j1 = endo_at(s.J1, pt), j2 = endo_at(s.J2, pt);
    const GenEndo p1 = phi_k(j1, tf, kAssemblyTol);
    const GenEndo p2 = phi_k(j2, tf, kAssemblyTol);
    const BihermData bp = extract_biherm(GenEndo(j1.m + h * p1.m, j1.d),
                                         GenEndo(j2.m + h * p2.m, j2.d),
                                         std::max(1e-8, 50.0 * h * h));
    rg = std::max(rg, ((bp.g - bh.g) / h - var.g_dot).cwiseAbs().maxCoeff());
    rb = std::max(rb, ((bp.b - bh.b) / h - var.b_dot).cwiseAbs().maxCoeff());
    ri = std::max(ri, ((bp.I - bh.I) / h - var.I_dot).cwiseAbs().maxCoeff());
    rj = std::max(rj, ((bp.J - bh.J) / h - var.J_dot).cwiseAbs().maxCoeff());
    rwi = std::max(rwi, ((bp.omega_I() - bh.omega_I()) / h - var.omega_I_dot)
                            .cwiseAbs().maxCoeff());
    rwj = std::max(rwj, ((bp.omega_J() - bh.omega_J()) / h - var.omega_J_dot)
                            .cwiseAbs().maxCoeff());
  }
  CheckContext ctx;
  ctx.grid_points = s.grid.N;
  ctx.notes = fmt("h %.1e; g %.2e b %.2e I %.2e J %.2e omega_I %.2e "
                  "omega_J %.2e",
                  h, rg, rb, ri, rj, rwi, rwj);
  return make_result("variation_formulas",
                     std::max({rg, rb, ri, rj, rwi, rwj}), tol, std::move(ctx));
}

// ---------------------------------------------------------------------------
// Curvature identities.

namespace {

// arr(a,b) = f(I e_a, e_b)
TensorField slot1_I(const TensorField& f, const TensorField& I) {
  TensorField out(f.grid, form_valence(2));
  for (std::size_t t = 0; t < f.npts(); ++t)
    set_point(out, t, at_point(I, t).transpose() * at_point(f, t));
  return out;
}

// arr(a,b) = f(e_a, I e_b)
TensorField slot2_I(const TensorField& f, const TensorField& I) {
  TensorField out(f.grid, form_valence(2));
  for (std::size_t t = 0; t < f.npts(); ++t)
    set_point(out, t, at_point(f, t) * at_point(I, t));
  return out;
}

double max_diff(const TensorField& a, const TensorField& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.ncomp(); ++c)
    for (std::size_t t = 0; t < a.npts(); ++t)
      m = std::max(m, std::abs(a.comp(c)[t] - b.comp(c)[t]));
  return m;
}

}  // namespace

CheckResult check_bismut_identities(const GKState& s, double tol) {
  const BismutRicci br = bismut_ricci(s.g, s.I);
  const TensorField H = h_flux(s.g, s.I);
  const TensorField th = lee_form(s.g, s.I);
  const TensorField ths = sharp(th, s.g);

  // rho11(., I.) = Rc - 1/4 H^2 - 1/2 L_{theta sharp} g
  TensorField rhs1 = ricci_tensor(s.g);
  {
    TensorField h2 = h_squared(s.g, H);
    h2 *= 0.25;
    rhs1 -= h2;
    TensorField lt = lie(ths, s.g);
    lt *= 0.5;
    rhs1 -= lt;
  }
  const double r1 = max_diff(slot2_I(br.rho11, s.I), rhs1);

  // rho02 = 1/2 (d*H(I., .) + d-nabla-theta(I., .)); the Levi-Civita reading
  // of d-nabla-theta is the exterior derivative of theta, and the Bismut
  // reading differs by i_{theta sharp} H, which vanishes identically on every
  // shipped scenario, so the two readings coincide here.
  TensorField rhs2 = slot1_I(codiff(H, s.g), s.I);
  rhs2 += slot1_I(ext_d(th), s.I);
  rhs2 *= 0.5;
  const double r2 = max_diff(br.rho02, rhs2);

  // rho02 = (d(theta o I))^{2,0+0,2} with (theta o I)(X) = theta(I X)
  TensorField thI(s.grid, form_valence(1));
  for (std::size_t t = 0; t < s.grid.npts(); ++t) {
    const Vec v = at_point(s.I, t).transpose() * vec_at_point(th, t);
    for (int a = 0; a < v.size(); ++a) thI.comp(a)[t] = v(a);
  }
  TensorField dthI = ext_d(thI);
  TensorField d02(s.grid, form_valence(2));
  for (std::size_t t = 0; t < s.grid.npts(); ++t) {
    const Mat k = at_point(dthI, t), Ip = at_point(s.I, t);
    set_point(d02, t, 0.5 * (k - Ip.transpose() * k * Ip));
  }
  const double r3 = max_diff(br.rho02, d02);

  CheckContext ctx;
  ctx.grid_points = s.grid.N;
  ctx.notes = fmt("rho11-vs-Ricci %.3e; rho02-vs-d*H+dtheta %.3e; "
                  "rho02-vs-(d I.theta)^02 %.3e; |H| %.3e |theta| %.3e",
                  r1, r2, r3, H.max_abs(), th.max_abs());
  return make_result("bismut_identities", std::max({r1, r2, r3}), tol,
                     std::move(ctx));
}

CheckResult check_sigchern2(const GKState& s, double tol) {
  const BismutRicci br = bismut_ricci(s.g, s.I);
  TensorField diff = lee_form(s.g, s.J);
  diff -= lee_form(s.g, s.I);
  const TensorField W = sharp(diff, s.g);
  const TensorField LWJ = lie(W, s.J);

  double res = 0.0, sub = 0.0, size = 0.0;
  for (std::size_t t = 0; t < s.grid.npts(); ++t) {
    const Mat g = at_point(s.g, t);
    const Mat Ip = at_point(s.I, t), Jp = at_point(s.J, t);
    const Mat C = Ip * Jp - Jp * Ip;
    const Mat rho = at_point(br.rho, t).transpose();  // map T -> T*
    const Mat lhs = g * at_point(LWJ, t);
    res = std::max(res, (lhs + C.transpose() * rho).cwiseAbs().maxCoeff());
    size = std::max(size, lhs.cwiseAbs().maxCoeff());
    sub = std::max(sub, (rho * Jp + Jp.transpose() * rho).cwiseAbs().maxCoeff());
  }
  CheckContext ctx;
  ctx.grid_points = s.grid.N;
  ctx.notes = fmt("identity %.3e (lhs size %.3e); rho-(1,1)-wrt-J %.3e; "
                  "calibrated composition: g.(L_W J) = -[I,J]^T rho, i.e. the "
                  "bilinear display with arguments rho([I,J]Y, X)",
                  res, size, sub);
  return make_result("sigchern2", std::max(res, sub), tol, std::move(ctx));
}

// ---------------------------------------------------------------------------
// Flow-equivalence.

CheckResult check_gkrf_equivalence(const GKState& s, const FlowConfig& cfg,
                                   double tol) {
  FlowResult a = gkrf_biherm(s, cfg);
  require(a.record.completed, "check_gkrf_equivalence",
          "bihermitian-formulation flow aborted");
  FlowResult b = gkrf_generalized(s, cfg);
  require(b.record.completed, "check_gkrf_equivalence",
          "generalized-formulation flow aborted");
  const double dist = state_distance(a.state, b.state);
  CheckContext ctx;
  ctx.grid_points = s.grid.N;
  ctx.notes = fmt("dt %.3e steps %d t_final %.3e; terminal state distance",
                  cfg.dt, cfg.steps, a.record.t_final);
  return make_result("gkrf_equivalence", dist, tol, std::move(ctx));
}

// ---------------------------------------------------------------------------
// Reports.

std::string report_json(const std::vector<CheckResult>& checks) {
  ordered_json arr = ordered_json::array();
  for (const CheckResult& c : checks) {
    arr.push_back(ordered_json{
        {"name", c.name},
        {"residual", c.residual},
        {"tolerance", c.tolerance},
        {"pass", c.pass},
        {"context",
         ordered_json{{"scenario", c.context.scenario},
                      {"grid", c.context.grid_points},
                      {"seed", c.context.seed},
                      {"notes", c.context.notes}}}});
  }
  return arr.dump(2) + "\n";
}

std::string report_table(const std::vector<CheckResult>& checks) {
  std::string out = fmt("%-28s %12s %12s  %-4s  %s\n", "check", "residual",
                        "tolerance", "stat", "scenario");
  int passed = 0;
  for (const CheckResult& c : checks) {
    out += fmt("%-28s %12.3e %12.3e  %-4s  %s\n", c.name.c_str(), c.residual,
               c.tolerance, c.pass ? "PASS" : "FAIL",
               c.context.scenario.c_str());
    if (c.pass) ++passed;
  }
  out += fmt("%d/%zu checks passed\n", passed, checks.size());
  return out;
}

}  // namespace gk
