#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "vism/basis.hpp"
#include "vism/eigen.hpp"
#include "vism/errors.hpp"
#include "vism/hamiltonian.hpp"
#include "vism/interpolant.hpp"
#include "vism/numeric.hpp"
#include "vism/potential.hpp"

namespace vism {

/// One eigenpair of a solved truncation, with the basis it lives in.
struct BoundState {
  int n = 0;
  HPReal energy;
  std::vector<HPReal> coefficients;
  BasisSpec spec;
  std::optional<Parity> parity;
};

inline BoundState bound_state(const Spectrum& s, int n) {
  if (n < 0 || static_cast<std::size_t>(n) >= s.size())
    throw Error(Errc::IndexOutOfRange, "solution", "state " + std::to_string(n) + " not in spectrum");
  if (!s.has_vectors()) throw Error(Errc::InvalidArgument, "solution", "spectrum was solved without vectors");
  if (!s.source) throw Error(Errc::InvalidArgument, "solution", "spectrum has no basis attached");
  const auto k = static_cast<std::size_t>(n);
  BoundState b{n, s.eigenvalues[k], s.eigenvectors[k], *s.source, std::nullopt};
  if (!s.parity.empty()) b.parity = s.parity[k];
  return b;
}

struct ErrorReport {
  std::optional<HPReal> delta_E;
  std::optional<HPReal> delta_psi;
  std::optional<HPReal> delta_E_hat;
  int M = 0;
};

namespace detail {

/// psi at one point, with cos(m theta) and sin(m theta) generated by the
/// Chebyshev recurrence instead of one transcendental call per mode.
inline HPReal psi_at(const BoundState& st, const HPReal& x, const HPReal& pi) {
  const BasisSpec& spec = st.spec;
  PrecisionScope scope(std::max(x.precision(), spec.L.precision()));
  const HPReal theta = spec.mode == BoundaryMode::Periodic ? HPReal(pi * x / spec.L) : HPReal(pi * x / (2 * spec.L));
  const HPReal c1 = cos(theta), s1 = sin(theta);
  const HPReal two_c1 = 2 * c1;
  const HPReal inv_sqrt_L = 1 / sqrt(spec.L);
  // cos(m theta), sin(m theta) for m = 0, 1, ...
  HPReal cm_prev = 1, cm = c1, sm_prev = 0, sm = s1, next;
  HPReal total = 0;
  const int top = spec.mode == BoundaryMode::Periodic ? spec.N : 2 * spec.N + 1;
  if (spec.mode == BoundaryMode::Periodic) total += st.coefficients[0] / sqrt(2 * spec.L);
  for (int m = 1; m <= top; ++m) {
    if (spec.mode == BoundaryMode::Periodic) {
      total += st.coefficients[static_cast<std::size_t>(m)] * cm * inv_sqrt_L;
      total += st.coefficients[static_cast<std::size_t>(spec.N + m)] * sm * inv_sqrt_L;
    } else {
      total += st.coefficients[static_cast<std::size_t>(m - 1)] * sm * inv_sqrt_L;
    }
    next = two_c1 * cm - cm_prev;
    cm_prev = cm;
    cm = next;
    next = two_c1 * sm - sm_prev;
    sm_prev = sm;
    sm = next;
  }
  return total;
}

inline void check_domain(const BasisSpec& spec, const HPReal& x) {
  if (x < spec.domain_lo() || x > spec.domain_hi())
    throw Error(Errc::OutOfDomain, "solution", "x = " + to_decimal(x, 10) + " outside the basis domain");
}

}  // namespace detail

/// psi(x) = sum_a A_a g_a(x), x in the solve coordinate of the basis.
inline HPReal eval_psi(const BoundState& st, const HPReal& x) {
  detail::check_domain(st.spec, x);
  const unsigned prec = std::max(x.precision(), st.spec.L.precision());
  return detail::psi_at(st, HPReal(x, prec), pi_at(prec));
}

/// Same, with x measured from the well centre (the coordinate the potential
/// and the reference wavefunctions are written in).
inline HPReal eval_psi_physical(const BoundState& st, const HPReal& y) {
  return eval_psi(st, solve_coordinate(st.spec, y));
}

/// |E_exact - E| / |E_exact|
inline HPReal delta_E_exact(const BoundState& st, const HPReal& exact_E) {
  if (exact_E == 0) throw Error(Errc::DivisionByZero, "solution", "exact energy is zero");
  return abs(exact_E - st.energy) / abs(exact_E);
}

/// Grid metric sqrt( sum |psi_ref - psi|^2 / sum |psi_ref|^2 ) over M
/// uniform points spanning the basis domain, end points included. The
/// reference is called with the centred coordinate. The approximate
/// state's overall sign is chosen to minimise the metric.
inline HPReal delta_psi_exact(const BoundState& st, const std::function<HPReal(const HPReal&)>& exact_psi,
                              int M = 1001) {
  if (M < 2) throw Error(Errc::InvalidArgument, "solution", "grid needs at least 2 points");
  const BasisSpec& spec = st.spec;
  const unsigned prec = spec.L.precision();
  PrecisionScope scope(prec);
  const HPReal pi = pi_at(prec);
  const HPReal lo = spec.domain_lo(), hi = spec.domain_hi();
  const HPReal step = (hi - lo) / (M - 1);
  HPReal plus = 0, minus = 0, ref = 0;
  for (int i = 0; i < M; ++i) {
    const HPReal x = i == M - 1 ? hi : HPReal(lo + i * step);
    const HPReal p = detail::psi_at(st, x, pi);
    const HPReal e = exact_psi(physical_coordinate(spec, x));
    plus += (e - p) * (e - p);
    minus += (e + p) * (e + p);
    ref += e * e;
  }
  if (ref == 0) throw Error(Errc::ZeroReference, "solution", "reference wavefunction vanishes on the grid");
  return sqrt(std::min(plus, minus) / ref);
}

/// CSV "x,psi" with x in the centred coordinate, M uniform points.
inline void write_wavefunction_csv(std::ostream& os, const BoundState& st, int M, unsigned digits) {
  if (M < 2) throw Error(Errc::InvalidArgument, "solution", "grid needs at least 2 points");
  const BasisSpec& spec = st.spec;
  PrecisionScope scope(spec.L.precision());
  const HPReal pi = pi_at(spec.L.precision());
  const HPReal lo = spec.domain_lo(), hi = spec.domain_hi();
  const HPReal step = (hi - lo) / (M - 1);
  os << "x,psi\n";
  for (int i = 0; i < M; ++i) {
    const HPReal x = i == M - 1 ? hi : HPReal(lo + i * step);
    os << to_decimal(physical_coordinate(spec, x), digits) << ',' << to_decimal(detail::psi_at(st, x, pi), digits)
       << '\n';
  }
}

/// |E(N) - E(N+1)| / |E(N+1)|, the reference-free error estimate from two
/// already-solved truncations.
inline HPReal relative_change(const HPReal& e_n, const HPReal& e_next) {
  if (e_next == 0) throw Error(Errc::DivisionByZero, "solution", "estimator denominator is zero");
  return abs(e_n - e_next) / abs(e_next);
}

/// Reference-free estimate for the first `count` states: solves at
/// (N, L(N)) and (N+1, L(N+1)) on the interpolant and returns the relative
/// change of each eigenvalue, using the N+1 value as denominator.
inline std::vector<HPReal> delta_E_hat_all(const PotentialSpec& pot, BoundaryMode mode, int N, int count,
                                           const LHatInterpolant& lhat, const PrecisionContext& ctx) {
  if (count < 1) throw Error(Errc::InvalidArgument, "solution", "state count must be positive");
  const Spectrum a = solve(BasisSpec(mode, N, at_precision(lhat(N), ctx)), pot, ctx, {false, true});
  const Spectrum b = solve(BasisSpec(mode, N + 1, at_precision(lhat(N + 1), ctx)), pot, ctx, {false, true});
  if (static_cast<std::size_t>(count) > a.size())
    throw Error(Errc::IndexOutOfRange, "solution", "only " + std::to_string(a.size()) + " states at N=" + std::to_string(N));
  std::vector<HPReal> out;
  for (int n = 0; n < count; ++n)
    out.push_back(relative_change(a.eigenvalues[static_cast<std::size_t>(n)], b.eigenvalues[static_cast<std::size_t>(n)]));
  return out;
}

inline HPReal delta_E_hat(const PotentialSpec& pot, BoundaryMode mode, int N, int state_index,
                          const LHatInterpolant& lhat, const PrecisionContext& ctx) {
  if (state_index < 0) throw Error(Errc::InvalidArgument, "solution", "state index must be >= 0");
  return delta_E_hat_all(pot, mode, N, state_index + 1, lhat, ctx).back();
}

}  // namespace vism
