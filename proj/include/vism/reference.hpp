#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vism/errors.hpp"
#include "vism/numeric.hpp"
#include "vism/potential.hpp"

namespace vism {

/// Harmonic oscillator -psi'' + x^2 psi = E psi: E_n = 2n + 1.
inline HPReal sho_energy(int n, const PrecisionContext& ctx) {
  if (n < 0) throw Error(Errc::InvalidArgument, "reference", "state index must be >= 0");
  return make_real(2LL * n + 1, ctx);
}

/// Normalised eigenfunction pi^(-1/4) H_n(x) exp(-x^2/2) / sqrt(2^n n!).
inline HPReal sho_psi(int n, const HPReal& x, const PrecisionContext& ctx) {
  if (n < 0) throw Error(Errc::InvalidArgument, "reference", "state index must be >= 0");
  PrecisionScope scope(ctx);
  const HPReal y = at_precision(x, ctx);
  HPReal norm = 1;
  for (int k = 1; k <= n; ++k) norm *= 2 * k;
  return hermite(static_cast<unsigned>(n), y) * exp(-y * y / 2) / (sqrt(sqrt(hp_pi(ctx))) * sqrt(norm));
}

namespace detail {

/// <n| x^4 |n> with x = (a + a^dagger)/sqrt(2), by summing every path of
/// four ladder steps that returns to n. Amplitudes are kept as squared
/// rationals, so the result is exact.
inline HPReal ladder_x4_diagonal(int n, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  HPReal total = 0;
  for (int mask = 0; mask < 16; ++mask) {
    int level = n;
    long long weight2 = 1;  // product of squared matrix elements
    bool alive = true;
    int net = 0;
    for (int step = 0; step < 4; ++step) {
      const bool raise = (mask >> step) & 1;
      net += raise ? 1 : -1;
      if (raise) {
        weight2 *= level + 1;  // a^dagger |k> = sqrt(k+1) |k+1>
        ++level;
      } else {
        if (level == 0) {
          alive = false;
          break;
        }
        weight2 *= level;  // a |k> = sqrt(k) |k-1>
        --level;
      }
    }
    if (!alive || net != 0) continue;
    total += sqrt(HPReal(weight2));
  }
  return total / 4;  // (1/sqrt 2)^4
}

}  // namespace detail

/// Zeroth- or first-order perturbation estimate for -psi'' + (x^2 + eps x^4) psi.
inline HPReal quartic_perturbation_energy(int n, int order, const HPReal& eps, const PrecisionContext& ctx) {
  if (order != 0 && order != 1)
    throw Error(Errc::UnsupportedOrder, "reference", "perturbation order " + std::to_string(order) + " not supported");
  PrecisionScope scope(ctx);
  HPReal e = sho_energy(n, ctx);
  if (order == 1) e += at_precision(eps, ctx) * detail::ladder_x4_diagonal(n, ctx);
  return e;
}

enum class ReferenceKind { Exact, Perturbation0, Perturbation1 };

inline std::string_view to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::Exact: return "exact";
    case ReferenceKind::Perturbation0: return "perturbation0";
    case ReferenceKind::Perturbation1: return "perturbation1";
  }
  return "?";
}

inline ReferenceKind parse_reference_kind(std::string_view s) {
  if (s == "exact") return ReferenceKind::Exact;
  if (s == "perturbation0") return ReferenceKind::Perturbation0;
  if (s == "perturbation1") return ReferenceKind::Perturbation1;
  throw Error(Errc::ParseError, "reference", "unknown reference '" + std::string(s) + "'");
}

/// Energies (and, when known, wavefunctions in the centred coordinate) of
/// a reference solution.
struct ReferenceSolution {
  std::string name;
  std::function<HPReal(int)> energy;
  std::function<HPReal(int, const HPReal&)> psi;  // empty if unavailable
};

/// Reference for a parsed potential: exact for x^2, perturbative for
/// x^2 + eps x^4. Throws ReferenceUnavailable otherwise.
inline ReferenceSolution make_reference(ReferenceKind kind, const PotentialSpec& pot, const PrecisionContext& ctx) {
  const auto unavailable = [&] {
    return Error(Errc::ReferenceUnavailable, "reference",
                 "no " + std::string(to_string(kind)) + " reference for '" + pot.to_string() + "'");
  };
  if (!pot.shift.is_zero() || !pot.cosines.empty()) throw unavailable();
  std::optional<Coefficient> quartic;
  bool harmonic = false;
  for (const auto& t : pot.monomials) {
    if (t.coefficient.is_zero()) continue;
    if (t.power == 2 && t.coefficient.is_one())
      harmonic = true;
    else if (t.power == 4)
      quartic = t.coefficient;
    else
      throw unavailable();
  }
  if (!harmonic) throw unavailable();

  if (!quartic) {
    // every kind coincides for the pure oscillator
    return {"sho-" + std::string(to_string(kind)), [ctx](int n) { return sho_energy(n, ctx); },
            [ctx](int n, const HPReal& x) { return sho_psi(n, x, ctx); }};
  }
  if (kind == ReferenceKind::Exact) throw unavailable();
  const int order = kind == ReferenceKind::Perturbation0 ? 0 : 1;
  const HPReal eps = quartic->value(ctx);
  return {"quartic-" + std::string(to_string(kind)),
          [ctx, order, eps](int n) { return quartic_perturbation_energy(n, order, eps, ctx); }, {}};
}

}  // namespace vism
