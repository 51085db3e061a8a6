#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vism/errors.hpp"
#include "vism/numeric.hpp"
#include "vism/quadrature.hpp"

namespace vism {

/// Periodic: sine/cosine series on [-L, L]. Confinement: sine series on the
/// shifted domain [0, 2L], vanishing at both walls.
enum class BoundaryMode { Periodic, Confinement };

enum class Trig { Sine = 1, Cosine = 2 };

enum class Parity { Even, Odd };

inline std::string_view to_string(BoundaryMode m) {
  return m == BoundaryMode::Periodic ? "periodic" : "confinement";
}
inline std::string_view to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

inline BoundaryMode parse_boundary_mode(std::string_view s) {
  if (s == "periodic") return BoundaryMode::Periodic;
  if (s == "confinement") return BoundaryMode::Confinement;
  throw Error(Errc::ParseError, "basis", "unknown boundary mode '" + std::string(s) + "'");
}

/// Truncated Fourier basis. Both modes hold 2N+1 functions:
///  - Periodic: cos(m pi x/L), m = 0..N (flat 0..N) then sin(m pi x/L),
///    m = 1..N (flat N+1..2N), normalised by 1/sqrt(L R_m).
///  - Confinement: sin(m pi x/2L)/sqrt(L), m = 1..2N+1 (flat m-1).
struct BasisSpec {
  BoundaryMode mode = BoundaryMode::Periodic;
  int N = 1;
  HPReal L = 1;

  BasisSpec() = default;
  BasisSpec(BoundaryMode mode_, int N_, HPReal L_) : mode(mode_), N(N_), L(std::move(L_)) { validate(); }

  void validate() const {
    if (N < 1) throw Error(Errc::InvalidArgument, "basis", "truncation N must be >= 1");
    if (!(L > 0)) throw Error(Errc::InvalidArgument, "basis", "half-length L must be positive");
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(2 * N + 1); }

  HPReal domain_lo() const { return mode == BoundaryMode::Periodic ? HPReal(-L) : HPReal(0 * L); }
  HPReal domain_hi() const { return mode == BoundaryMode::Periodic ? HPReal(L) : HPReal(2 * L); }
};

struct BasisIndex {
  int m = 0;
  Trig kind = Trig::Cosine;
  std::size_t flat = 0;

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

inline BasisIndex basis_index(const BasisSpec& spec, std::size_t flat) {
  if (flat >= spec.size())
    throw Error(Errc::IndexOutOfRange, "basis", "flat index " + std::to_string(flat) + " out of range");
  const auto n = static_cast<std::size_t>(spec.N);
  if (spec.mode == BoundaryMode::Confinement) return {static_cast<int>(flat) + 1, Trig::Sine, flat};
  if (flat <= n) return {static_cast<int>(flat), Trig::Cosine, flat};
  return {static_cast<int>(flat - n), Trig::Sine, flat};
}

/// Validates (m, kind) against the enumeration and fills in the flat index.
inline BasisIndex basis_index(const BasisSpec& spec, int m, Trig kind) {
  const auto bad = [&] {
    return Error(Errc::IndexOutOfRange, "basis",
                 "mode m=" + std::to_string(m) + (kind == Trig::Sine ? " (sine)" : " (cosine)") +
                     " not in basis of N=" + std::to_string(spec.N));
  };
  if (spec.mode == BoundaryMode::Confinement) {
    if (kind != Trig::Sine || m < 1 || m > 2 * spec.N + 1) throw bad();
    return {m, kind, static_cast<std::size_t>(m - 1)};
  }
  if (kind == Trig::Cosine) {
    if (m < 0 || m > spec.N) throw bad();
    return {m, kind, static_cast<std::size_t>(m)};
  }
  if (m < 1 || m > spec.N) throw bad();
  return {m, kind, static_cast<std::size_t>(spec.N + m)};
}

inline std::vector<BasisIndex> enumerate_basis(const BasisSpec& spec) {
  std::vector<BasisIndex> out;
  out.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) out.push_back(basis_index(spec, i));
  return out;
}

/// Parity under reflection about the domain centre (x -> -x periodic,
/// x -> 2L - x confinement).
inline Parity parity(const BasisSpec& spec, const BasisIndex& idx) {
  if (spec.mode == BoundaryMode::Periodic) return idx.kind == Trig::Cosine ? Parity::Even : Parity::Odd;
  return idx.m % 2 == 1 ? Parity::Even : Parity::Odd;
}

/// Maps the solve coordinate to the physical coordinate the potential is
/// written in (identity for periodic, x - L for confinement).
inline HPReal physical_coordinate(const BasisSpec& spec, const HPReal& x) {
  return spec.mode == BoundaryMode::Periodic ? HPReal(x) : HPReal(x - spec.L);
}
inline HPReal solve_coordinate(const BasisSpec& spec, const HPReal& y) {
  return spec.mode == BoundaryMode::Periodic ? HPReal(y) : HPReal(y + spec.L);
}

inline HPReal basis_norm(const BasisSpec& spec, const BasisIndex& idx) {
  if (spec.mode == BoundaryMode::Periodic && idx.kind == Trig::Cosine && idx.m == 0) return 1 / sqrt(2 * spec.L);
  return 1 / sqrt(spec.L);
}

/// Normalised basis function at x (solve coordinate).
inline HPReal eval_basis(const BasisSpec& spec, const BasisIndex& idx, const HPReal& x) {
  const BasisIndex checked = basis_index(spec, idx.m, idx.kind);
  const HPReal pival = pi_at(std::max(x.precision(), spec.L.precision()));
  const HPReal arg = spec.mode == BoundaryMode::Periodic ? HPReal(checked.m * pival * x / spec.L)
                                                          : HPReal(checked.m * pival * x / (2 * spec.L));
  const HPReal trig = checked.kind == Trig::Sine ? HPReal(sin(arg)) : HPReal(cos(arg));
  return basis_norm(spec, checked) * trig;
}

/// Eigenvalue of -d^2/dx^2 on the basis function: (m pi/L)^2 periodic,
/// (m pi/2L)^2 confinement.
inline HPReal kinetic_eigenvalue(const BasisSpec& spec, const BasisIndex& idx) {
  const BasisIndex checked = basis_index(spec, idx.m, idx.kind);
  const HPReal pi = pi_at(spec.L.precision());
  const HPReal k = spec.mode == BoundaryMode::Periodic ? HPReal(checked.m * pi / spec.L)
                                                        : HPReal(checked.m * pi / (2 * spec.L));
  return k * k;
}

/// Largest deviation of the numerically integrated Gram matrix from the
/// identity.
inline HPReal gram_check(const BasisSpec& spec, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const auto basis = enumerate_basis(spec);
  const HPReal lo = spec.domain_lo(), hi = spec.domain_hi();
  const HPReal tol = pow10_neg(static_cast<long>(ctx.digits()) + 2, ctx);
  HPReal worst = 0;
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = a; b < basis.size(); ++b) {
      HPReal g = gauss_quadrature(
          [&](const HPReal& x) { return HPReal(eval_basis(spec, basis[a], x) * eval_basis(spec, basis[b], x)); },
          lo, hi, ctx, tol);
      if (a == b) g -= 1;
      if (abs(g) > worst) worst = abs(g);
    }
  return worst;
}

}  // namespace vism
