#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "vism/basis.hpp"
#include "vism/matrix.hpp"
#include "vism/numeric.hpp"
#include "vism/potential.hpp"

namespace vism {

/// One parity sector of D together with the flat indices it was cut from.
struct ParityBlock {
  Parity parity = Parity::Even;
  DenseMatrix<HPReal> matrix;
  std::vector<std::size_t> flat_indices;
};

/// D_ab = kinetic(a) delta_ab + C_ab, dense and symmetric, plus the even
/// and odd blocks when the potential is even.
struct HamiltonianMatrix {
  BasisSpec spec;
  PotentialSpec pot;
  DenseMatrix<HPReal> D;
  std::optional<std::pair<ParityBlock, ParityBlock>> blocks;
};

struct AssembleOptions {
  /// Split into parity blocks when the potential allows it.
  bool parity_blocks = true;
};

namespace detail {

inline std::pair<ParityBlock, ParityBlock> split_by_parity(const BasisSpec& spec, const DenseMatrix<HPReal>& D) {
  ParityBlock even{Parity::Even, {}, {}}, odd{Parity::Odd, {}, {}};
  for (const auto& idx : enumerate_basis(spec))
    (parity(spec, idx) == Parity::Even ? even : odd).flat_indices.push_back(idx.flat);
  for (ParityBlock* blk : {&even, &odd}) {
    const std::size_t n = blk->flat_indices.size();
    blk->matrix = DenseMatrix<HPReal>(n, n, HPReal(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) blk->matrix(i, j) = D(blk->flat_indices[i], blk->flat_indices[j]);
  }
  return {std::move(even), std::move(odd)};
}

}  // namespace detail

/// Assembles D for the given basis and potential. Blocks are attached when
/// the potential is even (both modes: the confinement basis is symmetric
/// about the box centre).
inline HamiltonianMatrix assemble(const BasisSpec& spec, const PotentialSpec& pot, const PrecisionContext& ctx,
                                  AssembleOptions opts = {}) {
  PrecisionScope scope(ctx);
  BasisSpec s(spec.mode, spec.N, at_precision(spec.L, ctx));
  DenseMatrix<HPReal> D = assemble_coupling(s, pot, ctx);
  for (const auto& idx : enumerate_basis(s)) D(idx.flat, idx.flat) += kinetic_eigenvalue(s, idx);
  HamiltonianMatrix h{s, pot, std::move(D), std::nullopt};
  if (opts.parity_blocks && pot.is_even()) h.blocks = detail::split_by_parity(s, h.D);
  return h;
}

/// Even (cosine / odd-m) and odd (sine / even-m) sub-matrices of D.
/// Throws NotBlockDiagonal if a cross-parity entry exceeds 10^-(digits-10).
inline std::pair<ParityBlock, ParityBlock> parity_blocks(const HamiltonianMatrix& h, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const HPReal limit = pow10_neg(static_cast<long>(ctx.digits()) - 10, ctx);
  const auto basis = enumerate_basis(h.spec);
  for (const auto& a : basis)
    for (const auto& b : basis)
      if (parity(h.spec, a) != parity(h.spec, b) && abs(h.D(a.flat, b.flat)) > limit)
        throw Error(Errc::NotBlockDiagonal, "hamiltonian",
                    "cross-parity entry (" + std::to_string(a.flat) + "," + std::to_string(b.flat) +
                        ") = " + to_decimal(h.D(a.flat, b.flat), 6));
  if (h.blocks) return *h.blocks;
  return detail::split_by_parity(h.spec, h.D);
}

}  // namespace vism
