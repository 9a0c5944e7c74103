// Solves the canonical eps ladder at the critical coefficient and prints the
// blow-up quantities next to their limits.

#include <cmath>
#include <cstdio>

#include "critball/asympt.hpp"
#include "critball/solver.hpp"

using namespace critball;

int main() {
  solver::ProblemConfig cfg;  // unit ball, a = -pi^2/4, V = -1
  const auto ctx = asympt::make_context(cfg);
  std::vector<asympt::SweepRecord> records;

  std::printf("%8s %12s %10s %10s %10s %10s\n", "eps", "lambda", "eps*lam", "alpha", "beta", "gamma");
  for (const auto& rung : solver::sweep(cfg, {0.04, 0.02, 0.01, 0.005})) {
    if (!rung.solution) {
      std::printf("%8.4f failed: %s\n", rung.eps, rung.error.c_str());
      continue;
    }
    const auto r = asympt::make_record(*rung.solution, ctx, asympt::default_probes(1.0));
    std::printf("%8.4f %12.4f %10.5f %10.7f %10.6f %10.6f\n", r.eps, r.lambda, r.eps_lambda, r.alpha, r.beta, r.gamma);
    records.push_back(r);
  }

  const auto rep = asympt::build_report(records, ctx);
  std::printf("\neps*lambda      -> %.5f  (4 pi^2 |a| / |Q_V| = %.5f)\n", rep.rate.value, rep.rate.target);
  std::printf("(alpha - 1)/eps -> %.5f  (target %.5f)\n", rep.alpha->value, rep.alpha->target);
  std::printf("beta            -> %.6f (target %.6f)\n", rep.beta.value, rep.beta.target);
  std::printf("gamma           -> %.6f (target %.6f)\n", rep.gamma.value, rep.gamma.target);
  std::printf("all checks %s\n", rep.pass ? "pass" : "FAIL");
  return rep.pass ? 0 : 1;
}
