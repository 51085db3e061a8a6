// Ground state of x^2 + 10 cos(10 pi x) as an x,psi CSV on stdout.
//
//   rapid_wavefunction [N] [M]
//
// N must be at least the first built-in anchor (50); below the resolution
// threshold the solver only sees the averaged oscillator.

#include <cstdlib>
#include <iostream>

#include "vism/vism.hpp"

int main(int argc, char** argv) {
  using namespace vism;
  const int N = argc > 1 ? std::atoi(argv[1]) : 60;
  const int M = argc > 2 ? std::atoi(argv[2]) : 801;
  const PrecisionContext ctx(40);
  PrecisionScope scope(ctx);
  try {
    const PotentialSpec rapid = parse_potential("x^2 + 10*cos(10*pi*x)");
    const HPReal L = (*builtin_interpolant("rapid", ctx))(N);
    const BoundState st = bound_state(solve(BasisSpec(BoundaryMode::Periodic, N, L), rapid, ctx), 0);
    std::cerr << "N=" << N << " L=" << to_decimal(L, 8) << " E0=" << to_decimal_auto(st.energy, 20) << '\n';
    write_wavefunction_csv(std::cout, st, M, 12);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
