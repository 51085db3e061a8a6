// Error of the oscillator ground state along the calibrated L_hat(N) curve,
// next to the reference-free estimate.
//
//   sho_convergence [N_max]

#include <cstdlib>
#include <iostream>

#include "vism/vism.hpp"

int main(int argc, char** argv) {
  using namespace vism;
  const int N_max = argc > 1 ? std::atoi(argv[1]) : 30;
  const PotentialSpec sho = parse_potential("x^2");
  std::cout << "N,L_hat,E0,delta_E,delta_E_hat\n";
  for (int N = 2; N <= N_max; N += N < 10 ? 1 : 5) {
    const PrecisionContext ctx(calibration_digits(N, 30));
    PrecisionScope scope(ctx);
    const LHatInterpolant lhat = *builtin_interpolant("sho", ctx);
    const Spectrum s = solve(BasisSpec(BoundaryMode::Periodic, N, lhat(N)), sho, ctx, {false, true});
    const HPReal dE = abs(s.eigenvalues[0] - 1);
    const HPReal hat = delta_E_hat(sho, BoundaryMode::Periodic, N, 0, lhat, ctx);
    std::cout << N << ',' << to_decimal(lhat(N), 10) << ',' << to_decimal_auto(s.eigenvalues[0], 20) << ','
              << to_decimal(dE, 3) << ',' << to_decimal(hat, 3) << '\n';
  }
}
