// The Robin function phi_a of the unit ball for a few constant coefficients,
// and the centre quantities that make a = -pi^2/4 critical.

#include <cmath>
#include <cstdio>

#include "critball/greenfn.hpp"

using namespace critball;
using greenfn::RadialCoefficient;

int main() {
  const double R = 1.0;
  const double a_star = greenfn::critical_a(R);
  std::printf("critical coefficient a* = %.15f (-pi^2/4 = %.15f)\n\n", a_star, -pi * pi / 4);

  std::printf("%6s", "rho");
  const double as[] = {0.0, -1.0, a_star, -3.0};
  for (double a : as) std::printf("  phi_a, a=%-7.4f", a);
  std::printf("\n");
  for (double rho = 0.0; rho < 0.91; rho += 0.15) {
    std::printf("%6.2f", rho);
    for (double a : as) std::printf("  %17.10f", greenfn::phia_profile(rho, a, R));
    std::printf("\n");
  }

  const auto h = greenfn::phia_hessian(a_star, R);
  const double qv = greenfn::qv_center(RadialCoefficient::constant(-1.0), RadialCoefficient::constant(a_star), R);
  std::printf("\nat a*: phi_a''(0) = %.10f (pi^4/24 = %.10f), Q_V(0) for V = -1: %.12f (-2 pi)\n", h.series,
              std::pow(pi, 4) / 24, qv);
  return 0;
}
