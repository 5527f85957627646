#include "gk/verify.hpp"
#include <cstdio>
using namespace gk;
int main() {
  GKState ka = kaehler_torus(scalar_field(
      Grid(2, 12), [](const Vec& x) { return 0.1 * std::sin(x(1)) * std::sin(x(2)); }));
  TensorField Kc = potential_two_form(ka, random_scalar_field(ka.grid, 7));
  // closed+(1,1) K: both structures' nijvar residual
  CheckResult r = check_nijenhuis_variation(ka, Kc, 1e-2);
  std::printf("closed-K nijvar: %.3e\n  %s\n", r.residual, r.context.notes.c_str());
  // exact (closed, non-(1,1)) K into varform -> expect throw "not (1,1)"
  TensorField Ke = exact_two_form(ka, random_one_form_field(ka.grid, 11));
  std::printf("Ke |dK| %.3e\n", ext_d(Ke).max_abs());
  try {
    check_variation_formulas(ka, Ke, 1e-3);
    std::printf("varform(Ke): NO THROW\n");
  } catch (const Error& e) {
    std::printf("varform(Ke) threw: %s\n", e.what());
  }
  // uncertified state -> nijvar throws
  GKState bad = ka;
  bad.J *= 1.01;
  try {
    check_nijenhuis_variation(bad, Kc, 1e-2);
    std::printf("bad state: NO THROW\n");
  } catch (const Error& e) {
    std::printf("bad state threw: %s\n", e.what());
  }
  // varform ratio h -> h/2
  CheckResult v1 = check_variation_formulas(ka, Kc, 1e-3);
  CheckResult v2 = check_variation_formulas(ka, Kc, 5e-4);
  std::printf("varform ratio %.4f (%.3e / %.3e)\n", v1.residual / v2.residual,
              v1.residual, v2.residual);
  // gkrf abort -> throw
  GKState flat = kaehler_torus(TensorField(Grid(2, 8), Valence{}));
  FlowConfig fc;
  fc.dt = 1e-3; fc.steps = 3; fc.k_source = KSource::bismut_ricci;
  CheckResult gq = check_gkrf_equivalence(flat, fc);
  std::printf("flat gkrf equiv: %.3e\n", gq.residual);
  GKState jo = joyce_deform(hyperkaehler_t4(8),
      scalar_field(Grid(2, 8), [](const Vec& x) { return 0.05 * std::sin(x(0)) * std::sin(x(2)); }),
      0.15, 0.03);
  FlowConfig tiny = fc;
  tiny.rho_step_budget = 1e-12;
  try {
    check_gkrf_equivalence(jo, tiny);
    std::printf("tiny budget: NO THROW\n");
  } catch (const Error& e) {
    std::printf("tiny budget threw: %s\n", e.what());
  }
  CheckResult gj = check_gkrf_equivalence(jo, fc);
  std::printf("joyce N=8 gkrf equiv: %.3e\n", gj.residual);
  return 0;
}
