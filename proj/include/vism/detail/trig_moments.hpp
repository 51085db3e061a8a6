#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vism/basis.hpp"
#include "vism/numeric.hpp"

namespace vism::detail {

/// omega = multiple * unit + extra * omega_x, with `unit` the basis
/// frequency quantum (pi/L periodic, pi/2L confinement) and omega_x the
/// frequency of a trigonometric potential term. Keeping the integer part
/// separate makes exact cancellations (m = m') exact zeros.
struct Frequency {
  std::int64_t multiple = 0;
  int extra = 0;

  friend Frequency operator+(Frequency a, Frequency b) { return {a.multiple + b.multiple, a.extra + b.extra}; }
  friend Frequency operator-(Frequency a, Frequency b) { return {a.multiple - b.multiple, a.extra - b.extra}; }
};

struct TrigTerm {
  int sign;  // +1 or -1, the factor 1/2 of each product rule is applied by the caller
  Trig kind;
  Frequency freq;
};

/// Product-to-sum: trig1(A) * trig2(B) = 1/2 [t0 + t1].
inline std::array<TrigTerm, 2> trig_product(Trig k1, Frequency a, Trig k2, Frequency b) {
  if (k1 == Trig::Cosine && k2 == Trig::Cosine) return {{{+1, Trig::Cosine, a - b}, {+1, Trig::Cosine, a + b}}};
  if (k1 == Trig::Sine && k2 == Trig::Sine) return {{{+1, Trig::Cosine, a - b}, {-1, Trig::Cosine, a + b}}};
  if (k1 == Trig::Sine) return {{{+1, Trig::Sine, a + b}, {+1, Trig::Sine, a - b}}};
  return {{{+1, Trig::Sine, a + b}, {-1, Trig::Sine, a - b}}};
}

/// Basis function written in the centred coordinate y in [-L, L]:
/// amplitude * trig(multiple * unit * y).
struct CentredBasis {
  HPReal amplitude;
  Trig kind;
  std::int64_t multiple;
};

inline CentredBasis centred_basis(const BasisSpec& spec, const BasisIndex& idx) {
  const HPReal norm = basis_norm(spec, idx);
  if (spec.mode == BoundaryMode::Periodic) return {norm, idx.kind, idx.m};
  // sin(m pi (y + L)/2L) = sin(theta + m pi/2)
  if (idx.m % 2 == 1) {
    const int sign = ((idx.m - 1) / 2) % 2 == 0 ? 1 : -1;
    return {HPReal(sign * norm), Trig::Cosine, idx.m};
  }
  const int sign = (idx.m / 2) % 2 == 0 ? 1 : -1;
  return {HPReal(sign * norm), Trig::Sine, idx.m};
}

/// Closed-form moments  int_{-L}^{L} y^k trig(omega y) dy  for one value of
/// the auxiliary frequency omega_x.
class MomentKernel {
 public:
  MomentKernel(const BasisSpec& spec, const HPReal& omega_x, int max_power, const PrecisionContext& ctx)
      : L_(at_precision(spec.L, ctx)), omega_x_(at_precision(omega_x, ctx)), zero_(0, ctx.working_digits()) {
    PrecisionScope scope(ctx);
    const HPReal pi = hp_pi(ctx);
    unit_ = spec.mode == BoundaryMode::Periodic ? HPReal(pi / L_) : HPReal(pi / (2 * L_));
    quarter_turns_per_multiple_ = spec.mode == BoundaryMode::Periodic ? 2 : 1;
    sin_xL_ = sin(omega_x_ * L_);
    cos_xL_ = cos(omega_x_ * L_);
    threshold_ = pow10_neg(static_cast<long>(ctx.digits() / 2), ctx);
    L_pow_.resize(static_cast<std::size_t>(max_power) + 2);
    L_pow_[0] = 1;
    for (std::size_t i = 1; i < L_pow_.size(); ++i) L_pow_[i] = L_pow_[i - 1] * L_;
  }

  HPReal omega(Frequency f) const {
    HPReal w = f.multiple * unit_;
    if (f.extra != 0) w += f.extra * omega_x_;
    return w;
  }

  HPReal moment(int k, Trig kind, Frequency f) const {
    const bool odd_k = k % 2 != 0;
    if ((kind == Trig::Cosine) == odd_k) return zero_;  // odd integrand
    const HPReal w = omega(f);
    if (f.extra == 0 && f.multiple == 0) return zero_frequency(k, kind);
    if (abs(w) < threshold_) return zero_frequency(k, kind);  // resonance: analytic limit
    if (abs(w) * L_ < 1) return series(k, kind, w);
    return recursion(k, kind, f, w);
  }

 private:
  HPReal zero_frequency(int k, Trig kind) const {
    if (kind == Trig::Sine) return zero_;
    return 2 * L_pow_[static_cast<std::size_t>(k) + 1] / (k + 1);
  }

  // Power series in (omega L); used when |omega L| < 1 where the
  // integration-by-parts recursion would cancel.
  HPReal series(int k, Trig kind, const HPReal& w) const {
    const HPReal wL2 = w * w * L_ * L_;
    const HPReal eps = abs(threshold_ * threshold_) / 1000;
    HPReal sum = zero_;
    // term_j = (-1)^j (wL)^(2j+s) / (2j+s)!,  contribution 2 L^(k+1) term_j / (k + 2j + s + 1)
    const int s = kind == Trig::Cosine ? 0 : 1;
    HPReal t = kind == Trig::Cosine ? HPReal(zero_ + 1) : HPReal(w * L_);
    for (int j = 0; j < 100000; ++j) {
      const HPReal contrib = t / (k + 2 * j + s + 1);
      sum += contrib;
      if (abs(contrib) <= eps * abs(sum) || t == 0) break;
      t *= -wL2;
      t /= (2 * j + s + 1) * (2 * j + s + 2);
    }
    return 2 * L_pow_[static_cast<std::size_t>(k) + 1] * sum;
  }

  // Integration by parts:
  //   C_k = 2 L^k sin(wL)/w - (k/w) S_{k-1}      (k even)
  //   S_k = -2 L^k cos(wL)/w + (k/w) C_{k-1}     (k odd)
  HPReal recursion(int k, Trig kind, Frequency f, const HPReal& w) const {
    (void)kind;
    HPReal s, c;
    phase(f, s, c);
    HPReal value = 2 * s / w;  // C_0
    for (int j = 1; j <= k; ++j) {
      const HPReal& Lj = L_pow_[static_cast<std::size_t>(j)];
      if (j % 2 == 1)
        value = (-2 * Lj * c + j * value) / w;
      else
        value = (2 * Lj * s - j * value) / w;
    }
    return value;
  }

  // sin/cos of omega*L: the integer part is a multiple of pi/2 and is
  // applied exactly; the auxiliary part by angle addition.
  void phase(Frequency f, HPReal& s, HPReal& c) const {
    const std::int64_t q = ((f.multiple * quarter_turns_per_multiple_) % 4 + 4) % 4;
    static constexpr int sq[4] = {0, 1, 0, -1};
    static constexpr int cq[4] = {1, 0, -1, 0};
    if (f.extra == 0) {
      s = zero_ + sq[q];
      c = zero_ + cq[q];
      return;
    }
    const HPReal sx = f.extra * sin_xL_;  // sin(extra * omega_x * L), extra = +-1
    const HPReal& cx = cos_xL_;
    s = sq[q] * cx + cq[q] * sx;
    c = cq[q] * cx - sq[q] * sx;
  }

  HPReal L_;
  HPReal omega_x_;
  HPReal unit_;
  HPReal sin_xL_;
  HPReal cos_xL_;
  HPReal threshold_;
  HPReal zero_;
  int quarter_turns_per_multiple_ = 2;
  std::vector<HPReal> L_pow_;
};

}  // namespace vism::detail
