#pragma once

#include <functional>
#include <vector>

#include "vism/errors.hpp"
#include "vism/numeric.hpp"

namespace vism {

/// n-point Gauss–Legendre rule on [-1, 1], nodes found by Newton iteration
/// on the Legendre recurrence at the scope's working precision.
class GaussLegendreRule {
 public:
  GaussLegendreRule(unsigned n, const PrecisionContext& ctx) : n_(n) {
    if (n == 0) throw Error(Errc::InvalidArgument, "numeric", "quadrature rule needs at least one node");
    PrecisionScope scope(ctx);
    nodes_.resize(n);
    weights_.resize(n);
    const HPReal pi = hp_pi(ctx);
    const HPReal tol = pow10_neg(static_cast<long>(ctx.working_digits()) - 3, ctx);
    const unsigned half = (n + 1) / 2;
    for (unsigned i = 0; i < half; ++i) {
      // Tricomi's initial guess, then Newton.
      HPReal x = cos(pi * (i + HPReal(0.75)) / (n + HPReal(0.5)));
      HPReal dp;
      for (int iter = 0; iter < 100; ++iter) {
        HPReal p0 = 1, p1 = x;
        for (unsigned k = 2; k <= n; ++k) {
          HPReal p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = std::move(p1);
          p1 = std::move(p2);
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        HPReal dx = p1 / dp;
        x -= dx;
        if (abs(dx) <= tol) break;
      }
      HPReal w = 2 / ((1 - x * x) * dp * dp);
      nodes_[i] = -x;
      nodes_[n - 1 - i] = x;
      weights_[i] = w;
      weights_[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes_[n / 2] = 0;
  }

  unsigned size() const noexcept { return n_; }
  const std::vector<HPReal>& nodes() const noexcept { return nodes_; }
  const std::vector<HPReal>& weights() const noexcept { return weights_; }

  /// Composite rule over `panels` equal panels of [a, b].
  template <class F>
  HPReal integrate(F&& f, const HPReal& a, const HPReal& b, unsigned long panels = 1) const {
    const HPReal width = (b - a) / panels;
    const HPReal half = width / 2;
    HPReal total = 0;
    for (unsigned long p = 0; p < panels; ++p) {
      const HPReal mid = a + width * p + half;
      HPReal partial = 0;
      for (unsigned i = 0; i < n_; ++i) partial += weights_[i] * f(HPReal(mid + half * nodes_[i]));
      total += partial;
    }
    return total * half;
  }

 private:
  unsigned n_;
  std::vector<HPReal> nodes_;
  std::vector<HPReal> weights_;
};

struct QuadratureOptions {
  /// Nodes per panel; 0 selects a default tied to the working precision.
  unsigned order = 0;
  /// Maximum number of panel doublings before giving up.
  unsigned max_doublings = 20;
};

inline unsigned default_quadrature_order(const PrecisionContext& ctx) {
  return std::max(16u, ctx.working_digits() / 2);
}

/// Adaptive Gauss–Legendre integration of f over [a, b]: the panel count is
/// doubled until two successive composite estimates agree within `tol`.
/// Throws NonConvergence once `max_doublings` is exhausted.
template <class F>
HPReal gauss_quadrature(F&& f, const HPReal& a, const HPReal& b, const PrecisionContext& ctx,
                        const HPReal& tol, QuadratureOptions opts = {}) {
  if (!(tol > 0)) throw Error(Errc::InvalidArgument, "numeric", "quadrature tolerance must be positive");
  PrecisionScope scope(ctx);
  const GaussLegendreRule rule(opts.order ? opts.order : default_quadrature_order(ctx), ctx);
  const HPReal lo = at_precision(a, ctx), hi = at_precision(b, ctx);
  HPReal previous = rule.integrate(f, lo, hi, 1);
  for (unsigned level = 1; level <= opts.max_doublings; ++level) {
    HPReal current = rule.integrate(f, lo, hi, 1ul << level);
    if (abs(current - previous) < tol) return current;
    previous = std::move(current);
  }
  throw Error(Errc::NonConvergence, "numeric",
              "quadrature did not converge after " + std::to_string(opts.max_doublings) + " doublings");
}

}  // namespace vism
