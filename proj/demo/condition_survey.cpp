// Condition estimate of the inverse system versus grid size for three regularization choices.
//
// usage: demo_condition_survey

#include <cstdio>

#include "ipip/discretize.hpp"
#include "ipip/solver.hpp"

int main() {
  using namespace ipip;
  const Regularization regs[] = {{}, {RegularizationMode::phase, 0.1}, {RegularizationMode::shift, 0.01}};
  std::printf("%6s %14s %14s %14s\n", "N", "alpha=1", "exp(0.1i)", "1.01");
  for (std::size_t N : {100u, 200u, 400u, 800u, 1600u}) {
    const KernelMatrix M = assemble_M(ZGrid(90, 100, N));
    std::printf("%6zu", N);
    for (const auto& r : regs) std::printf(" %14.3e", condition_estimate(system_matrix(M, r.alpha())));
    std::printf("\n");
  }
  return 0;
}
