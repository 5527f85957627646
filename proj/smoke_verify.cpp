// Throwaway smoke harness for the verify module (not a deliverable).
#include "gk/verify.hpp"
#include <chrono>
#include <cstdio>

using namespace gk;

static GKState curved_kaehler(int N) {
  Grid g(2, N);
  TensorField u = scalar_field(
      g, [](const Vec& x) { return 0.1 * std::sin(x(1)) * std::sin(x(2)); });
  return kaehler_torus(u);
}

static GKState joyce(int N) {
  GKState hk = hyperkaehler_t4(N);
  Grid g = hk.grid;
  TensorField u = scalar_field(
      g, [](const Vec& x) { return 0.05 * std::sin(x(0)) * std::sin(x(2)); });
  return joyce_deform(hk, u, 0.15, 0.03);
}

static double tic_last = 0.0;
static double now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}
static void tic() { tic_last = now(); }
static void toc(const char* what) {
  std::printf("   [%.2fs] %s\n", now() - tic_last, what);
  std::fflush(stdout);
}

int main() {
  const int N = 12;
  tic();
  GKState ka = curved_kaehler(N);
  GKState jo = joyce(N);
  toc("states");

  std::vector<CheckResult> rs;
  auto show = [&](CheckResult r, const char* scen) {
    r.context.scenario = scen;
    std::printf("%-26s %-9s res %.3e tol %.1e  %s\n      %s\n", r.name.c_str(),
                scen, r.residual, r.tolerance, r.pass ? "PASS" : "FAIL",
                r.context.notes.c_str());
    std::fflush(stdout);
    rs.push_back(std::move(r));
  };

  tic();
  show(check_bismut_identities(ka), "kaehler");
  show(check_bismut_identities(jo), "joyce");
  toc("bismut");

  tic();
  show(check_sigchern2(ka), "kaehler");
  show(check_sigchern2(jo), "joyce");
  toc("sigchern");

  // partial integrability: closed K passes; sin x1 dx2^dx3 is J1-main-exact-0
  tic();
  TensorField Kc = potential_two_form(ka, random_scalar_field(ka.grid, 7));
  show(check_partial_integrability(ka, Kc), "kaehler closed");
  TensorField Knc = sample_field(
      ka.grid, form_valence(2), [](const Vec& x, const std::vector<int>& i) {
        if (i[0] == 2 && i[1] == 3) return std::sin(x(1));
        if (i[0] == 3 && i[1] == 2) return -std::sin(x(1));
        return 0.0;
      });
  {
    PartialConditions pc = partial_integrability_residuals(ka, Knc);
    std::printf("weaker-K breakdown: j1 %.3e/%.3e j2 %.3e/%.3e |dK| %.3e\n",
                pc.j1_main, pc.j1_conj, pc.j2_main, pc.j2_conj,
                ext_d(Knc).max_abs());
  }
  toc("partial");

  tic();
  show(check_variation_formulas(ka, Kc, 1e-3), "kaehler");
  TensorField Kj = potential_two_form(jo, random_scalar_field(jo.grid, 9));
  show(check_variation_formulas(jo, Kj, 1e-3), "joyce");
  toc("varform");

  tic();
  show(check_compatibility_equivalence(ka, 6), "kaehler");
  toc("compat 6 samples");

  tic();
  show(check_dk_equivalence(ka, 6), "kaehler");
  toc("dk_equiv 6 samples");

  tic();
  show(check_nijenhuis_variation(ka, Knc, 2e-2, 5e-4), "kaehler h=2e-2");
  show(check_nijenhuis_variation(ka, Knc, 1e-2, 5e-4), "kaehler h=1e-2");
  toc("nijvar x2");

  tic();
  FlowConfig fc;
  fc.dt = 1e-3;
  fc.steps = 10;
  fc.k_source = KSource::bismut_ricci;
  show(check_gkrf_equivalence(jo, fc, 1e-5), "joyce");
  toc("gkrf");

  std::printf("\n%s\n", report_table(rs).c_str());
  std::printf("%s", report_json({rs[0]}).c_str());
  return 0;
}
