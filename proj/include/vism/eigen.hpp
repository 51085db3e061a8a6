#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "vism/basis.hpp"
#include "vism/errors.hpp"
#include "vism/hamiltonian.hpp"
#include "vism/matrix.hpp"
#include "vism/numeric.hpp"

namespace vism {

namespace detail {

template <class Real>
struct JacobiResult {
  std::vector<Real> values;
  DenseMatrix<Real> vectors;  // column k pairs with values[k]; empty if not requested
  unsigned sweeps = 0;
};

/// Cyclic Jacobi for a symmetric matrix. Rotations sweep (p, q) in row
/// order, so the result is deterministic. Only the upper triangle of the
/// working copy is kept current. Stops once the off-diagonal Frobenius norm
/// falls to `off_tol`.
template <class Real>
JacobiResult<Real> jacobi_eigen(const DenseMatrix<Real>& m, const Real& off_tol, unsigned max_sweeps,
                                bool want_vectors) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = m.rows();
  DenseMatrix<Real> a = m;
  JacobiResult<Real> out;
  if (want_vectors) out.vectors = DenseMatrix<Real>::identity(n, Real(1) + 0 * m(0, 0), 0 * m(0, 0));
  auto up = [&a](std::size_t i, std::size_t j) -> Real& { return i < j ? a(i, j) : a(j, i); };

  Real off, theta, t, c, s, tau, g, h, tmp;
  for (unsigned sweep = 0;; ++sweep) {
    off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    off = sqrt(2 * off);
    if (off <= off_tol) {
      out.sweeps = sweep;
      break;
    }
    if (sweep == max_sweeps)
      throw Error(Errc::NoConvergence, "eigen",
                  "Jacobi did not converge in " + std::to_string(max_sweeps) + " sweeps");

    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        Real& apq = a(p, q);
        if (apq == 0) continue;
        theta = a(q, q);
        theta -= a(p, p);
        theta /= 2 * apq;
        t = sqrt(theta * theta + 1);
        t += abs(theta);
        t = 1 / t;
        if (theta < 0) t = -t;
        c = 1 / sqrt(t * t + 1);
        s = t * c;
        tau = s / (1 + c);
        tmp = t * apq;
        a(p, p) -= tmp;
        a(q, q) += tmp;
        apq = 0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          Real& arp = up(r, p);
          Real& arq = up(r, q);
          g = arp;
          h = arq;
          // arp = g - s (h + g tau);  arq = h + s (g - h tau)
          tmp = g;
          tmp *= tau;
          tmp += h;
          tmp *= s;
          arp -= tmp;
          tmp = h;
          tmp *= tau;
          tmp -= g;
          tmp *= s;
          arq -= tmp;
        }
        if (want_vectors) {
          for (std::size_t r = 0; r < n; ++r) {
            Real& vrp = out.vectors(r, p);
            Real& vrq = out.vectors(r, q);
            g = vrp;
            h = vrq;
            tmp = g;
            tmp *= tau;
            tmp += h;
            tmp *= s;
            vrp -= tmp;
            tmp = h;
            tmp *= tau;
            tmp -= g;
            tmp *= s;
            vrq -= tmp;
          }
        }
      }
  }
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  return out;
}

}  // namespace detail

/// Eigenpairs of a symmetric matrix, eigenvalues ascending. Each vector is
/// unit-norm with its largest-magnitude component positive (ties go to the
/// lowest index).
struct Spectrum {
  std::vector<HPReal> eigenvalues;
  std::vector<std::vector<HPReal>> eigenvectors;  // empty when only values were requested
  std::vector<Parity> parity;                     // filled by the blockwise solver
  std::optional<BasisSpec> source;
  unsigned sweeps = 0;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  bool has_vectors() const noexcept { return !eigenvectors.empty(); }
};

struct EighOptions {
  bool vectors = true;
  unsigned max_sweeps = 50;
};

namespace detail {

inline void normalise_sign(std::vector<HPReal>& v, const PrecisionContext& ctx) {
  if (v.empty()) return;
  HPReal biggest = 0;
  for (const auto& x : v) biggest = std::max<HPReal>(biggest, abs(x));
  const HPReal cut = biggest * (1 - pow10_neg(static_cast<long>(ctx.digits() / 2), ctx));
  for (const auto& x : v) {
    if (abs(x) >= cut) {
      if (x < 0)
        for (auto& y : v) y = -y;
      return;
    }
  }
}

inline void normalise_length(std::vector<HPReal>& v) {
  HPReal n2 = 0;
  for (const auto& x : v) n2 += x * x;
  const HPReal inv = 1 / sqrt(n2);
  for (auto& x : v) x *= inv;
}

}  // namespace detail

/// Full eigen-decomposition of a dense symmetric matrix by cyclic Jacobi
/// rotations at the context's working precision.
inline Spectrum eigh(const DenseMatrix<HPReal>& M, const PrecisionContext& ctx, EighOptions opts = {}) {
  if (!M.square()) throw Error(Errc::InvalidArgument, "eigen", "matrix must be square");
  PrecisionScope scope(ctx);
  const std::size_t n = M.rows();
  Spectrum out;
  if (n == 0) return out;
  DenseMatrix<HPReal> a(n, n, HPReal(0));
  for (std::size_t i = 0; i < n * n; ++i) a.data()[i] = at_precision(M.data()[i], ctx);

  const HPReal scale = max_abs_entry(a);
  if (asymmetry(a) > pow10_neg(static_cast<long>(ctx.digits()) - 10, ctx) * (scale == 0 ? HPReal(1) : scale))
    throw Error(Errc::NotSymmetric, "eigen", "matrix is not symmetric");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);

  const HPReal off_tol =
      pow10_neg(static_cast<long>(ctx.digits() + ctx.guard_digits() / 2), ctx) * frobenius_norm(a);
  auto res = detail::jacobi_eigen(a, off_tol, opts.max_sweeps, opts.vectors);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return res.values[x] < res.values[y]; });
  out.sweeps = res.sweeps;
  out.eigenvalues.reserve(n);
  for (std::size_t k : order) out.eigenvalues.push_back(res.values[k]);
  if (opts.vectors) {
    out.eigenvectors.reserve(n);
    for (std::size_t k : order) {
      std::vector<HPReal> v(n);
      for (std::size_t r = 0; r < n; ++r) v[r] = res.vectors(r, k);
      detail::normalise_length(v);
      detail::normalise_sign(v, ctx);
      out.eigenvectors.push_back(std::move(v));
    }
  }
  return out;
}

/// Solves the even and odd blocks separately and merges them into one
/// ascending spectrum, mapping block vectors back to flat indexing.
inline Spectrum eigh_blockwise(const HamiltonianMatrix& h, const PrecisionContext& ctx, EighOptions opts = {}) {
  if (!h.blocks) throw Error(Errc::InvalidArgument, "eigen", "Hamiltonian has no parity blocks");
  PrecisionScope scope(ctx);
  const auto& [even, odd] = *h.blocks;
  const Spectrum se = eigh(even.matrix, ctx, opts);
  const Spectrum so = eigh(odd.matrix, ctx, opts);
  const std::size_t n = h.D.rows();

  Spectrum out;
  out.source = h.spec;
  out.sweeps = std::max(se.sweeps, so.sweeps);
  std::size_t i = 0, j = 0;
  auto take = [&](const Spectrum& s, const ParityBlock& blk, std::size_t k) {
    out.eigenvalues.push_back(s.eigenvalues[k]);
    out.parity.push_back(blk.parity);
    if (opts.vectors) {
      std::vector<HPReal> v(n, HPReal(0));
      for (std::size_t r = 0; r < blk.flat_indices.size(); ++r) v[blk.flat_indices[r]] = s.eigenvectors[k][r];
      out.eigenvectors.push_back(std::move(v));
    }
  };
  while (i < se.size() || j < so.size()) {
    if (j >= so.size() || (i < se.size() && !(so.eigenvalues[j] < se.eigenvalues[i])))
      take(se, even, i++);
    else
      take(so, odd, j++);
  }
  return out;
}

struct SolveOptions {
  bool vectors = true;
  bool parity_blocks = true;
};

/// Assemble and diagonalise in one step.
inline Spectrum solve(const BasisSpec& spec, const PotentialSpec& pot, const PrecisionContext& ctx,
                      SolveOptions opts = {}) {
  const HamiltonianMatrix h = assemble(spec, pot, ctx, {opts.parity_blocks});
  const EighOptions eo{opts.vectors, 50};
  if (h.blocks) return eigh_blockwise(h, ctx, eo);
  Spectrum s = eigh(h.D, ctx, eo);
  s.source = h.spec;
  return s;
}

}  // namespace vism
