#pragma once

#include <cctype>
#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vism/basis.hpp"
#include "vism/detail/trig_moments.hpp"
#include "vism/errors.hpp"
#include "vism/matrix.hpp"
#include "vism/numeric.hpp"
#include "vism/quadrature.hpp"

namespace vism {

/// Exact decimal (or a/b rational) coefficient kept as text, so the same
/// potential can be materialised at any precision without inheriting the
/// rounding of an earlier one.
class Coefficient {
 public:
  Coefficient() : text_("0") {}
  explicit Coefficient(std::string text) : text_(normalise(std::move(text))) {}
  Coefficient(long long v) : text_(std::to_string(v)) {}  // NOLINT(google-explicit-constructor)

  const std::string& text() const noexcept { return text_; }

  HPReal value(const PrecisionContext& ctx) const {
    const auto slash = text_.find('/');
    if (slash == std::string::npos) return parse_decimal(text_, ctx);
    PrecisionScope scope(ctx);
    const HPReal den = parse_decimal(std::string_view(text_).substr(slash + 1), ctx);
    if (den == 0) throw Error(Errc::ParseError, "potential", "zero denominator in '" + text_ + "'");
    return parse_decimal(std::string_view(text_).substr(0, slash), ctx) / den;
  }

  bool is_zero() const { return value(PrecisionContext()) == 0; }
  bool is_one() const { return value(PrecisionContext()) == 1; }

  Coefficient negated() const {
    if (!text_.empty() && text_[0] == '-') return Coefficient(text_.substr(1));
    return Coefficient("-" + text_);
  }

  friend bool operator==(const Coefficient&, const Coefficient&) = default;

 private:
  static std::string normalise(std::string s) {
    std::string out;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    if (!out.empty() && out[0] == '+') out.erase(0, 1);
    if (out.empty()) throw Error(Errc::ParseError, "potential", "empty coefficient");
    return out;
  }

  std::string text_;
};

/// c * x^k
struct MonomialTerm {
  int power = 0;
  Coefficient coefficient;
};

/// alpha * cos(beta * pi * x)
struct CosineTerm {
  Coefficient amplitude;
  Coefficient frequency;
};

/// f(x) = sum c x^k + sum alpha cos(beta pi x), evaluated at (x - shift).
/// x is the physical coordinate, centred on the well; the confinement
/// mode's own x -> x - L translation is applied by the coupling kernels.
struct PotentialSpec {
  std::vector<MonomialTerm> monomials;
  std::vector<CosineTerm> cosines;
  Coefficient shift;

  bool empty() const {
    for (const auto& t : monomials)
      if (!t.coefficient.is_zero()) return false;
    for (const auto& t : cosines)
      if (!t.amplitude.is_zero()) return false;
    return true;
  }

  /// True when f(-x) = f(x), which lets the Hamiltonian split by parity.
  bool is_even() const {
    if (!shift.is_zero()) return empty();
    for (const auto& t : monomials)
      if (t.power % 2 != 0 && !t.coefficient.is_zero()) return false;
    return true;
  }

  int max_power() const {
    int k = 0;
    for (const auto& t : monomials) k = std::max(k, t.power);
    return k;
  }

  HPReal operator()(const HPReal& x, const PrecisionContext& ctx) const {
    PrecisionScope scope(ctx);
    const HPReal y = x - shift.value(ctx);
    const HPReal pi = hp_pi(ctx);
    HPReal f = 0;
    for (const auto& t : monomials) f += t.coefficient.value(ctx) * pow(y, t.power);
    for (const auto& t : cosines) f += t.amplitude.value(ctx) * cos(t.frequency.value(ctx) * pi * y);
    return f;
  }

  /// Canonical text form, e.g. "x^2 + 0.1*x^4" or "x^2 + 10*cos(10*pi*x)".
  std::string to_string() const {
    std::vector<std::pair<bool, std::string>> parts;  // (negative, body)
    auto coeff_prefix = [](const Coefficient& c, bool& neg) {
      std::string t = c.text();
      neg = !t.empty() && t[0] == '-';
      if (neg) t.erase(0, 1);
      return t;
    };
    for (const auto& t : monomials) {
      bool neg = false;
      std::string c = coeff_prefix(t.coefficient, neg);
      std::string var = t.power == 0 ? "" : (t.power == 1 ? "x" : "x^" + std::to_string(t.power));
      std::string body;
      if (var.empty())
        body = c;
      else if (c == "1")
        body = var;
      else
        body = c + "*" + var;
      parts.emplace_back(neg, body);
    }
    for (const auto& t : cosines) {
      bool neg = false;
      std::string a = coeff_prefix(t.amplitude, neg);
      std::string b = t.frequency.text();
      std::string arg = (b == "1" ? std::string("pi*x") : b + "*pi*x");
      parts.emplace_back(neg, (a == "1" ? std::string() : a + "*") + "cos(" + arg + ")");
    }
    if (parts.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i == 0)
        out += (parts[i].first ? "-" : "") + parts[i].second;
      else
        out += (parts[i].first ? " - " : " + ") + parts[i].second;
    }
    if (!shift.is_zero()) out += " @shift=" + shift.text();
    return out;
  }
};

namespace detail {

/// Recursive-descent parser for sums of `c*x^k` and `a*cos(b*pi*x)` terms.
class PotentialParser {
 public:
  explicit PotentialParser(std::string_view text) : s_(text) {}

  PotentialSpec parse() {
    PotentialSpec out;
    skip_ws();
    if (at_end()) fail("empty potential");
    bool first = true;
    while (!at_end()) {
      if (peek() == '@') {
        shift_suffix(out);
        break;
      }
      bool negative = false;
      if (peek() == '+' || peek() == '-') {
        negative = get() == '-';
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      term(negative, out);
      skip_ws();
    }
    merge_monomials(out);
    for (const auto& t : out.monomials) check(t.coefficient);
    for (const auto& t : out.cosines) {
      check(t.amplitude);
      check(t.frequency);
    }
    check(out.shift);
    return out;
  }

 private:
  void term(bool negative, PotentialSpec& out) {
    std::optional<std::string> coeff;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      coeff = number();
      skip_ws();
      if (peek() == '/') {
        get();
        skip_ws();
        *coeff += "/" + number();
        skip_ws();
      }
      if (peek() != '*') {
        out.monomials.push_back({0, signed_coeff(negative, *coeff)});
        return;
      }
      get();
      skip_ws();
    }
    const std::string c = coeff.value_or("1");
    if (peek() == 'x') {
      get();
      skip_ws();
      int k = 1;
      if (peek() == '^') {
        get();
        skip_ws();
        k = integer();
      }
      out.monomials.push_back({k, signed_coeff(negative, c)});
      return;
    }
    if (s_.substr(pos_, 3) == "cos") {
      pos_ += 3;
      expect('(');
      std::string beta = "1";
      skip_ws();
      if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
        beta = number();
        skip_ws();
        if (peek() == '/') {
          get();
          skip_ws();
          beta += "/" + number();
        }
        expect('*');
      }
      skip_ws();
      if (s_.substr(pos_, 2) != "pi") fail("expected 'pi' inside cos()");
      pos_ += 2;
      expect('*');
      expect('x');
      expect(')');
      out.cosines.push_back({signed_coeff(negative, c), Coefficient(beta)});
      return;
    }
    fail("expected a term");
  }

  // "@shift=<number>", the suffix written by PotentialSpec::to_string
  void shift_suffix(PotentialSpec& out) {
    get();
    if (s_.substr(pos_, 5) != "shift") fail("expected 'shift' after '@'");
    pos_ += 5;
    expect('=');
    skip_ws();
    bool negative = false;
    if (peek() == '-' || peek() == '+') negative = get() == '-';
    std::string v = number();
    skip_ws();
    if (peek() == '/') {
      get();
      skip_ws();
      v += "/" + number();
    }
    skip_ws();
    if (!at_end()) fail("trailing input after shift");
    out.shift = signed_coeff(negative, v);
  }

  void check(const Coefficient& c) const {
    try {
      (void)c.value(PrecisionContext());
    } catch (const Error& e) {
      fail(std::string("bad coefficient: ") + e.what());
    }
  }

  static Coefficient signed_coeff(bool negative, const std::string& c) {
    return negative ? Coefficient("-" + c) : Coefficient(c);
  }

  static void merge_monomials(PotentialSpec& p) {
    std::stable_sort(p.monomials.begin(), p.monomials.end(),
                     [](const MonomialTerm& x, const MonomialTerm& y) { return x.power < y.power; });
  }

  std::string number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      ++pos_;
      if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (pos_ == start) fail("expected a number");
    return std::string(s_.substr(start, pos_ - start));
  }

  int integer() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == start) fail("expected an integer exponent");
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  char get() { return s_[pos_++]; }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::ParseError, "potential",
                why + " at position " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline PotentialSpec parse_potential(std::string_view text) { return detail::PotentialParser(text).parse(); }

/// Symmetric matrix C_ab = integral of g_a f g_b over the basis domain,
/// indexed by BasisIndex::flat.
using CouplingMatrix = DenseMatrix<HPReal>;

/// Highest monomial power with a closed-form coupling kernel.
inline constexpr int kMaxClosedFormPower = 4;

namespace detail {

/// One term of the potential written in the centred coordinate:
/// coef * y^power * trig(omega_x y), or coef * y^power when `trig` is empty.
struct CentredTerm {
  HPReal coef;
  int power = 0;
  std::optional<Trig> trig;
  HPReal omega_x;
};

/// Expands the shift: (y - s)^k by the binomial theorem and
/// cos(b pi (y - s)) by angle addition.
inline std::vector<CentredTerm> centred_terms(const PotentialSpec& pot, const PrecisionContext& ctx, bool closed_form_only) {
  PrecisionScope scope(ctx);
  std::vector<CentredTerm> out;
  const HPReal s = pot.shift.value(ctx);
  const HPReal pi = hp_pi(ctx);
  for (const auto& t : pot.monomials) {
    if (closed_form_only && t.power > kMaxClosedFormPower) continue;
    const HPReal c = t.coefficient.value(ctx);
    if (c == 0) continue;
    if (s == 0) {
      out.push_back({c, t.power, std::nullopt, HPReal(0)});
      continue;
    }
    HPReal binom = 1;
    for (int j = 0; j <= t.power; ++j) {
      // C(k, j) (-s)^(k-j) y^j
      out.push_back({HPReal(c * binom * pow(-s, t.power - j)), j, std::nullopt, HPReal(0)});
      binom = binom * (t.power - j) / (j + 1);
    }
  }
  for (const auto& t : pot.cosines) {
    const HPReal a = t.amplitude.value(ctx);
    if (a == 0) continue;
    const HPReal w = t.frequency.value(ctx) * pi;
    if (s == 0) {
      out.push_back({a, 0, Trig::Cosine, w});
      continue;
    }
    out.push_back({HPReal(a * cos(w * s)), 0, Trig::Cosine, w});
    out.push_back({HPReal(a * sin(w * s)), 0, Trig::Sine, w});
  }
  return out;
}

/// Closed-form coupling entries for a fixed basis and list of centred terms.
/// Entries are independent pure functions of (a, b).
class CouplingKernel {
 public:
  CouplingKernel(const BasisSpec& spec, std::vector<CentredTerm> terms, const PrecisionContext& ctx)
      : spec_(spec), terms_(std::move(terms)), ctx_(ctx) {
    PrecisionScope scope(ctx);
    for (const auto& idx : enumerate_basis(spec)) basis_.push_back(centred_basis(spec, idx));
    for (const auto& t : terms_) kernels_.emplace_back(spec, t.trig ? t.omega_x : HPReal(0), t.power, ctx);
  }

  HPReal entry(std::size_t a, std::size_t b) const {
    PrecisionScope scope(ctx_);
    const auto& ga = basis_[a];
    const auto& gb = basis_[b];
    const Frequency fa{ga.multiple, 0}, fb{gb.multiple, 0};
    HPReal total = 0;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& term = terms_[i];
      const auto& kern = kernels_[i];
      HPReal acc = 0;
      for (const auto& p : trig_product(ga.kind, fa, gb.kind, fb)) {
        if (!term.trig) {
          acc += p.sign * kern.moment(term.power, p.kind, p.freq);
          continue;
        }
        for (const auto& q : trig_product(p.kind, p.freq, *term.trig, Frequency{0, 1}))
          acc += (p.sign * q.sign) * kern.moment(term.power, q.kind, q.freq) / 2;
      }
      total += term.coef * acc / 2;
    }
    return ga.amplitude * gb.amplitude * total;
  }

  CouplingMatrix matrix() const {
    const std::size_t n = spec_.size();
    PrecisionScope scope(ctx_);
    CouplingMatrix c(n, n, HPReal(0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        c(a, b) = entry(a, b);
        if (b != a) c(b, a) = c(a, b);
      }
    return c;
  }

 private:
  BasisSpec spec_;
  std::vector<CentredTerm> terms_;
  PrecisionContext ctx_;
  std::vector<CentredBasis> basis_;
  std::vector<MomentKernel> kernels_;
};

}  // namespace detail

/// Closed-form matrix of  integral g_a x^k g_b  over the mode's domain
/// (x centred on the well; confinement integrates f(x - L) over [0, 2L]).
inline CouplingMatrix coupling_monomial(const BasisSpec& spec, int k, const PrecisionContext& ctx) {
  if (k < 0 || k > kMaxClosedFormPower)
    throw Error(Errc::UnsupportedExponent, "potential",
                "no closed-form kernel for x^" + std::to_string(k) + "; use coupling_quadrature");
  PrecisionScope scope(ctx);
  std::vector<detail::CentredTerm> terms{{HPReal(1), k, std::nullopt, HPReal(0)}};
  return detail::CouplingKernel(spec, std::move(terms), ctx).matrix();
}

/// Closed-form matrix of  integral g_a alpha cos(beta pi x) g_b.
inline CouplingMatrix coupling_cosine(const BasisSpec& spec, const HPReal& alpha, const HPReal& beta,
                                      const PrecisionContext& ctx) {
  if (!(beta > 0)) throw Error(Errc::InvalidArgument, "potential", "cosine frequency factor must be positive");
  PrecisionScope scope(ctx);
  const HPReal w = at_precision(beta, ctx) * hp_pi(ctx);
  std::vector<detail::CentredTerm> terms{{at_precision(alpha, ctx), 0, Trig::Cosine, w}};
  return detail::CouplingKernel(spec, std::move(terms), ctx).matrix();
}

/// Every entry by adaptive Gauss–Legendre quadrature of g_a f g_b in the
/// solve coordinate. Independent of the closed-form kernels.
inline CouplingMatrix coupling_quadrature(const BasisSpec& spec, const PotentialSpec& pot, const PrecisionContext& ctx,
                                          const HPReal& tol) {
  PrecisionScope scope(ctx);
  const auto basis = enumerate_basis(spec);
  const std::size_t n = basis.size();
  const HPReal lo = spec.domain_lo(), hi = spec.domain_hi();
  CouplingMatrix c(n, n, HPReal(0));
  if (pot.empty()) return c;
  auto integrate = [&](std::size_t a, std::size_t b) {
    try {
      return gauss_quadrature(
          [&](const HPReal& x) {
            return HPReal(eval_basis(spec, basis[a], x) * pot(physical_coordinate(spec, x), ctx) *
                          eval_basis(spec, basis[b], x));
          },
          lo, hi, ctx, tol);
    } catch (const Error& e) {
      if (e.code() != Errc::NonConvergence) throw;
      throw Error(Errc::NonConvergence, "potential",
                  "coupling entry (" + std::to_string(a) + "," + std::to_string(b) + "): " + e.what());
    }
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      if (b == a) {
        c(a, a) = integrate(a, a);
        continue;
      }
      const HPReal avg = (integrate(a, b) + integrate(b, a)) / 2;
      c(a, b) = avg;
      c(b, a) = avg;
    }
  return c;
}

/// Sums the closed-form kernels for every supported term and routes the
/// rest (powers above kMaxClosedFormPower) through quadrature.
inline CouplingMatrix assemble_coupling(const BasisSpec& spec, const PotentialSpec& pot, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  CouplingMatrix c = detail::CouplingKernel(spec, detail::centred_terms(pot, ctx, true), ctx).matrix();
  PotentialSpec rest;
  rest.shift = pot.shift;
  for (const auto& t : pot.monomials)
    if (t.power > kMaxClosedFormPower) rest.monomials.push_back(t);
  if (!rest.empty()) {
    const CouplingMatrix q = coupling_quadrature(spec, rest, ctx, pow10_neg(static_cast<long>(ctx.digits()) + 2, ctx));
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += q.data()[i];
  }
  return c;
}

}  // namespace vism
