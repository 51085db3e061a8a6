#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ios>
#include <string>
#include <string_view>

#include "vism/errors.hpp"

namespace vism {

/// Arbitrary-precision real. Each value carries its own MPFR precision;
/// arithmetic results take the larger precision of their operands.
using HPReal = boost::multiprecision::mpfr_float;

/// Working precision threaded through every computation. `digits` is the
/// number of decimal digits the caller wants to be correct; `guard_digits`
/// are carried on top of that internally.
class PrecisionContext {
 public:
  static constexpr unsigned kMinDigits = 16;
  static constexpr unsigned kDefaultGuard = 10;

  explicit PrecisionContext(unsigned digits = kMinDigits, unsigned guard_digits = kDefaultGuard)
      : digits_(digits), guard_(guard_digits) {
    if (digits_ < kMinDigits)
      throw Error(Errc::InvalidArgument, "numeric",
                  "precision must be at least 16 decimal digits, got " + std::to_string(digits));
  }

  unsigned digits() const noexcept { return digits_; }
  unsigned guard_digits() const noexcept { return guard_; }
  unsigned working_digits() const noexcept { return digits_ + guard_; }

  friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;

 private:
  unsigned digits_;
  unsigned guard_;
};

/// Pins the MPFR default precision (used for literals, conversions and
/// constants) to the context's working precision for the lifetime of the
/// scope. Nested scopes restore the outer setting.
class PrecisionScope {
 public:
  explicit PrecisionScope(const PrecisionContext& ctx) : saved_(HPReal::default_precision()) {
    HPReal::default_precision(ctx.working_digits());
  }
  /// Pins an explicit number of working digits.
  explicit PrecisionScope(unsigned working_digits) : saved_(HPReal::default_precision()) {
    HPReal::default_precision(working_digits);
  }
  ~PrecisionScope() { HPReal::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

/// Re-rounds `x` to the context's working precision.
inline HPReal at_precision(const HPReal& x, const PrecisionContext& ctx) {
  return HPReal(x, ctx.working_digits());
}

inline HPReal make_real(long long v, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  return HPReal(v);
}

/// 10^(-e) at working precision. `e` may be negative.
inline HPReal pow10_neg(long e, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  HPReal r;
  mpfr_ui_pow_ui(r.backend().data(), 10u, static_cast<unsigned long>(e < 0 ? -e : e), MPFR_RNDN);
  if (e > 0) r = HPReal(1) / r;
  return r;
}

/// Parses a decimal string ("1.25", "-3e-7", "0.1") at working precision.
inline HPReal parse_decimal(std::string_view text, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw Error(Errc::ParseError, "numeric", "empty number");
  HPReal r;
  char* end = nullptr;
  mpfr_strtofr(r.backend().data(), s.c_str(), &end, 10, MPFR_RNDN);
  if (end != s.c_str() + s.size() || !isfinite(r))
    throw Error(Errc::ParseError, "numeric", "not a decimal number: '" + s + "'");
  return r;
}

/// A double converted through its shortest round-trip decimal form, so
/// 1e-8 becomes exactly 10^-8 at working precision.
inline HPReal from_double(double v, const PrecisionContext& ctx) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  for (int p = 1; p <= 17; ++p) {
    char trial[64];
    std::snprintf(trial, sizeof trial, "%.*g", p, v);
    if (std::strtod(trial, nullptr) == v) {
      std::snprintf(buf, sizeof buf, "%s", trial);
      break;
    }
  }
  return parse_decimal(buf, ctx);
}

/// Decimal string with `digits` significant digits (scientific notation).
inline std::string to_decimal(const HPReal& x, unsigned digits) {
  return x.str(static_cast<std::streamsize>(digits > 0 ? digits - 1 : 0), std::ios_base::scientific);
}

/// Plain fixed-point-looking output for moderate magnitudes; used where a
/// human-readable column is wanted (tables, CSV).
inline std::string to_decimal_auto(const HPReal& x, unsigned digits) {
  return x.str(static_cast<std::streamsize>(digits));
}

/// pi rounded to `digits10` decimal digits of precision.
inline HPReal pi_at(unsigned digits10) {
  HPReal r(0, digits10);
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

inline HPReal hp_pi(const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  HPReal r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n - 2n H_{n-1}.
inline HPReal hermite(unsigned n, const HPReal& x) {
  HPReal prev = HPReal(1, x.precision());
  if (n == 0) return prev;
  HPReal cur = 2 * x;
  for (unsigned k = 1; k < n; ++k) {
    HPReal next = 2 * x * cur - 2 * static_cast<long>(k) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// Number of leading decimal digits on which `a` and `b` agree, measured
/// as -log10(|a-b|/|b|). Returns `cap` for identical values.
inline double agreeing_digits(const HPReal& a, const HPReal& b, double cap = 1e4) {
  if (a == b) return cap;
  HPReal rel = abs(a - b) / (b == 0 ? HPReal(1) : abs(b));
  return std::min(cap, -static_cast<double>(log10(rel)));
}

/// log10 of a positive HPReal as a double; safe for magnitudes far below
/// the double range (e.g. 1e-400).
inline double log10_of(const HPReal& x) {
  if (x <= 0) return -1e300;
  return static_cast<double>(log10(x));
}

}  // namespace vism
