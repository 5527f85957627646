#include "gk/verify.hpp"
#include <cstdio>
using namespace gk;
int main() {
  // joyce at N=8: does it certify to 1e-6?
  GKState jo = joyce_deform(hyperkaehler_t4(8),
      scalar_field(Grid(2, 8), [](const Vec& x) { return 0.05 * std::sin(x(0)) * std::sin(x(2)); }),
      0.15, 0.03);
  CertifyReport c = certify(jo);
  std::printf("joyce N=8 certify worst %.3e positivity %.3e\n", c.worst(), c.positivity_margin);
  GKState jo16 = joyce_deform(hyperkaehler_t4(16),
      scalar_field(Grid(2, 16), [](const Vec& x) { return 0.05 * std::sin(x(0)) * std::sin(x(2)); }),
      0.15, 0.03);
  CertifyReport c16 = certify(jo16);
  std::printf("joyce N=16 certify worst %.3e\n", c16.worst());
  // commuting product state: default potentials
  Grid g(2, 8);
  TensorField up = scalar_field(g, [](const Vec& x) { return 0.05 * std::sin(x(0)) * std::sin(x(1)); });
  TensorField um = scalar_field(g, [](const Vec& x) { return 0.03 * std::sin(x(2)) * std::sin(x(3)); });
  GKState cp = commuting_product(up, um);
  std::printf("commuting N=8 certify worst %.3e\n", certify(cp).worst());
  return 0;
}
