#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vism/basis.hpp"
#include "vism/eigen.hpp"
#include "vism/errors.hpp"
#include "vism/interpolant.hpp"
#include "vism/numeric.hpp"
#include "vism/potential.hpp"
#include "vism/reference.hpp"
#include "vism/solution.hpp"

namespace vism {

struct LBracket {
  HPReal lo;
  HPReal hi;
};

/// [0.5 s, 10 s] * scale with s = sqrt(2 state_index + 2), the rough
/// spatial extent of the state.
inline LBracket default_bracket(int state_index, const PrecisionContext& ctx, const HPReal& scale = HPReal(1)) {
  PrecisionScope scope(ctx);
  const HPReal s = sqrt(HPReal(2 * state_index + 2)) * at_precision(scale, ctx);
  return {s / 2, 10 * s};
}

/// Sorted eigenvalue `state_index` for one (mode, N, L).
inline HPReal energy_at(const PotentialSpec& pot, BoundaryMode mode, int N, int state_index, const HPReal& L,
                        const PrecisionContext& ctx) {
  const Spectrum s = solve(BasisSpec(mode, N, at_precision(L, ctx)), pot, ctx, {false, true});
  if (state_index < 0 || static_cast<std::size_t>(state_index) >= s.size())
    throw Error(Errc::IndexOutOfRange, "optimize", "state " + std::to_string(state_index) + " not in spectrum");
  return s.eigenvalues[static_cast<std::size_t>(state_index)];
}

struct ScanSample {
  HPReal L;
  HPReal E;
};

/// E(L) on `samples` uniformly spaced points of [lo, hi], end points included.
inline std::vector<ScanSample> scan_E_vs_L(const PotentialSpec& pot, BoundaryMode mode, int N, int state_index,
                                           const HPReal& lo, const HPReal& hi, int samples,
                                           const PrecisionContext& ctx) {
  if (samples < 5) throw Error(Errc::InvalidArgument, "optimize", "an L scan needs at least 5 samples");
  if (!(lo > 0) || !(hi > lo)) throw Error(Errc::InvalidArgument, "optimize", "L range must be positive and increasing");
  PrecisionScope scope(ctx);
  const HPReal a = at_precision(lo, ctx), b = at_precision(hi, ctx);
  std::vector<ScanSample> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const HPReal L = i == samples - 1 ? b : HPReal(a + (b - a) * i / (samples - 1));
    out.push_back({L, energy_at(pot, mode, N, state_index, L, ctx)});
  }
  return out;
}

/// Interior features of a uniformly sampled curve. `minima` holds sample
/// indices; an entry i of `inflections` means the second difference
/// changes sign between samples i and i+1.
struct ScanFeatures {
  std::vector<std::size_t> minima;
  std::vector<std::size_t> inflections;
};

inline ScanFeatures detect_features(const std::vector<ScanSample>& scan) {
  ScanFeatures f;
  const std::size_t n = scan.size();
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (scan[i].E < scan[i - 1].E && scan[i].E <= scan[i + 1].E) f.minima.push_back(i);
  std::vector<int> sign(n, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const HPReal d2 = scan[i + 1].E - 2 * scan[i].E + scan[i - 1].E;
    sign[i] = d2 > 0 ? 1 : (d2 < 0 ? -1 : 0);
  }
  for (std::size_t i = 1; i + 2 < n; ++i) {
    if (sign[i] * sign[i + 1] < 0) f.inflections.push_back(i);
    // an exactly vanishing second difference at i+1 between opposite signs
    if (sign[i + 1] == 0 && i + 3 < n && sign[i] * sign[i + 2] < 0) f.inflections.push_back(i);
  }
  return f;
}

/// Which inflection of the periodic E(L) to take when a scan finds several.
enum class InflectionPick {
  Flattest,      // smallest |E'| overall
  LowestBranch,  // smallest |E'| among inflections within branch_width (relative) of the lowest E
};

/// Everything find_L_hat needs beyond the method and N.
struct FindOptions {
  std::optional<LBracket> bracket;  // default_bracket when empty
  double tol_L = 1e-8;              // relative to max(1, L)
  int scan_samples = 24;
  BoundaryMode error_mode = BoundaryMode::Periodic;  // basis used by the error and estimator objectives
  const ReferenceSolution* reference = nullptr;
  int M = 1001;  // grid for the wavefunction error
  InflectionPick pick = InflectionPick::Flattest;
  double branch_width = 1e-3;
};

namespace detail {

inline HPReal tolerance_at(const FindOptions& o, const HPReal& L, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const HPReal t = from_double(o.tol_L, ctx);
  return L > 1 ? HPReal(t * L) : t;
}

/// Golden-section minimum of f on [a, b].
inline HPReal golden_section(const std::function<HPReal(const HPReal&)>& f, HPReal a, HPReal b,
                             const FindOptions& o, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const HPReal r = (sqrt(HPReal(5)) - 1) / 2;
  HPReal x1 = b - r * (b - a), x2 = a + r * (b - a);
  HPReal f1 = f(x1), f2 = f(x2);
  for (int iter = 0; iter < 400 && b - a > tolerance_at(o, b, ctx); ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

/// Scan f over the bracket and return the neighbourhood of its lowest
/// interior local minimum.
inline LBracket scan_minimum(const std::function<HPReal(const HPReal&)>& f, const LBracket& br, int samples,
                             const PrecisionContext& ctx, const char* what) {
  PrecisionScope scope(ctx);
  std::vector<ScanSample> scan;
  for (int i = 0; i < samples; ++i) {
    const HPReal L = br.lo + (br.hi - br.lo) * i / (samples - 1);
    scan.push_back({L, f(L)});
  }
  const auto feats = detect_features(scan);
  if (feats.minima.empty())
    throw Error(Errc::BracketInvalid, "optimize",
                std::string("no interior minimum of ") + what + " in [" + to_decimal(br.lo, 8) + ", " +
                    to_decimal(br.hi, 8) + "]");
  std::size_t best = feats.minima.front();
  for (auto i : feats.minima)
    if (scan[i].E < scan[best].E) best = i;
  return {scan[best - 1].L, scan[best + 1].L};
}

}  // namespace detail

/// Locates the optimal half-length for truncation N.
///  - EnergyMinConfinement: golden-section minimum of E(L), confinement basis.
///  - EnergyInflectionPeriodic: bisection on the central second difference
///    of E(L) (step sqrt(tol_L) L), periodic basis. With several
///    inflections in the scan, opts.pick decides.
///  - EnergyErrorMin / WavefunctionErrorMin: golden-section minimum of the
///    error against opts.reference, in opts.error_mode.
///  - EstimatorMin: golden-section minimum of the N vs N+1 relative change.
inline LHatAnchor find_L_hat(const PotentialSpec& pot, LHatMethod method, int N, int state_index,
                             const PrecisionContext& ctx, const FindOptions& opts = {}) {
  if (N < 1) throw Error(Errc::InvalidArgument, "optimize", "N must be >= 1");
  if (state_index < 0) throw Error(Errc::InvalidArgument, "optimize", "state index must be >= 0");
  if (opts.scan_samples < 5) throw Error(Errc::InvalidArgument, "optimize", "scan needs at least 5 samples");
  PrecisionScope scope(ctx);
  const LBracket br = opts.bracket ? LBracket{at_precision(opts.bracket->lo, ctx), at_precision(opts.bracket->hi, ctx)}
                                   : default_bracket(state_index, ctx);
  if (!(br.lo > 0) || !(br.hi > br.lo)) throw Error(Errc::BracketInvalid, "optimize", "bracket must satisfy 0 < lo < hi");

  const bool needs_reference = method == LHatMethod::EnergyErrorMin || method == LHatMethod::WavefunctionErrorMin;
  if (needs_reference && (!opts.reference || !opts.reference->energy))
    throw Error(Errc::ReferenceRequired, "optimize", std::string(to_string(method)) + " needs a reference solution");
  if (method == LHatMethod::WavefunctionErrorMin && !opts.reference->psi)
    throw Error(Errc::ReferenceRequired, "optimize", "reference '" + opts.reference->name + "' has no wavefunctions");

  std::function<HPReal(const HPReal&)> objective;
  switch (method) {
    case LHatMethod::EnergyMinConfinement:
      objective = [&](const HPReal& L) { return energy_at(pot, BoundaryMode::Confinement, N, state_index, L, ctx); };
      break;
    case LHatMethod::EnergyErrorMin: {
      const HPReal exact = opts.reference->energy(state_index);
      if (exact == 0) throw Error(Errc::DivisionByZero, "optimize", "reference energy is zero");
      objective = [&, exact](const HPReal& L) {
        return HPReal(abs(energy_at(pot, opts.error_mode, N, state_index, L, ctx) - exact) / abs(exact));
      };
      break;
    }
    case LHatMethod::WavefunctionErrorMin:
      objective = [&](const HPReal& L) {
        const Spectrum s = solve(BasisSpec(opts.error_mode, N, at_precision(L, ctx)), pot, ctx);
        const auto ref = [&](const HPReal& y) { return opts.reference->psi(state_index, y); };
        return delta_psi_exact(bound_state(s, state_index), ref, opts.M);
      };
      break;
    case LHatMethod::EstimatorMin:
      objective = [&](const HPReal& L) {
        return relative_change(energy_at(pot, opts.error_mode, N, state_index, L, ctx),
                               energy_at(pot, opts.error_mode, N + 1, state_index, L, ctx));
      };
      break;
    case LHatMethod::EnergyInflectionPeriodic:
      break;
  }

  if (method != LHatMethod::EnergyInflectionPeriodic) {
    const LBracket local = detail::scan_minimum(objective, br, opts.scan_samples, ctx, "the objective");
    return {N, detail::golden_section(objective, local.lo, local.hi, opts, ctx), method, state_index};
  }

  // inflection of the periodic E(L)
  const auto scan = scan_E_vs_L(pot, BoundaryMode::Periodic, N, state_index, br.lo, br.hi, opts.scan_samples, ctx);
  const auto feats = detect_features(scan);
  if (feats.inflections.empty())
    throw Error(Errc::BracketInvalid, "optimize",
                "no inflection of E(L) in [" + to_decimal(br.lo, 8) + ", " + to_decimal(br.hi, 8) + "]");
  std::vector<std::size_t> candidates = feats.inflections;
  if (opts.pick == InflectionPick::LowestBranch) {
    HPReal lowest = scan[candidates.front()].E;
    for (auto i : candidates) lowest = std::min(lowest, HPReal(scan[i].E));
    const HPReal width = from_double(opts.branch_width, ctx) * abs(lowest);
    std::erase_if(candidates, [&](std::size_t i) { return scan[i].E - lowest > width; });
  }
  std::size_t pick = candidates.front();
  HPReal flattest = -1;
  for (auto i : candidates) {
    const HPReal slope = abs(scan[i + 1].E - scan[i].E);
    if (flattest < 0 || slope < flattest) {
      flattest = slope;
      pick = i;
    }
  }
  const auto curvature = [&](const HPReal& L) {
    const HPReal h = sqrt(from_double(opts.tol_L, ctx)) * L;
    const auto e = [&](const HPReal& x) { return energy_at(pot, BoundaryMode::Periodic, N, state_index, x, ctx); };
    return HPReal(e(L + h) - 2 * e(L) + e(L - h));
  };
  HPReal a = scan[pick].L, b = scan[pick + 1].L;
  HPReal ga = curvature(a), gb = curvature(b);
  if (ga * gb > 0) {
    // the grid sign change came from the coarse step; widen by one sample each way
    a = scan[pick - 1].L;
    b = scan[std::min(pick + 2, scan.size() - 1)].L;
    ga = curvature(a);
    gb = curvature(b);
    if (ga * gb > 0)
      throw Error(Errc::BracketInvalid, "optimize", "second difference does not change sign around the inflection");
  }
  for (int iter = 0; iter < 400 && b - a > detail::tolerance_at(opts, b, ctx); ++iter) {
    const HPReal mid = (a + b) / 2;
    const HPReal gm = curvature(mid);
    if (gm == 0) return {N, mid, method, state_index};
    if ((gm > 0) == (ga > 0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return {N, (a + b) / 2, method, state_index};
}

/// A high-N solve standing in for an exact reference.
inline ReferenceSolution make_surrogate_reference(const PotentialSpec& pot, BoundaryMode mode, int N, const HPReal& L,
                                                  const PrecisionContext& ctx) {
  auto spectrum = std::make_shared<Spectrum>(solve(BasisSpec(mode, N, at_precision(L, ctx)), pot, ctx));
  return {"surrogate-N" + std::to_string(N),
          [spectrum](int n) { return spectrum->eigenvalues.at(static_cast<std::size_t>(n)); },
          [spectrum](int n, const HPReal& y) {
            const BoundState st = bound_state(*spectrum, n);
            const HPReal x = solve_coordinate(st.spec, y);
            if (x < st.spec.domain_lo() || x > st.spec.domain_hi()) return HPReal(0 * y);
            return eval_psi(st, x);
          }};
}

struct CalibrationEntry {
  int N = 0;
  std::optional<LHatAnchor> anchor;
  std::string error;  // set when this N failed
};

/// Working precision used for an anchor at truncation N. The optimum sits
/// where E(L) is accurate to roughly N^1.1 digits, and locating it needs
/// those digits plus headroom.
inline unsigned calibration_digits(int N, unsigned floor_digits) {
  const unsigned need = 30 + static_cast<unsigned>(1.6 * N);
  return std::max(floor_digits, need);
}

/// find_L_hat for each N in ascending order. Once two anchors exist, the
/// bracket for the next N is a +-20% window around the power-law
/// extrapolation of the previous two, with the default bracket as a
/// fallback. Failures are recorded per N and do not stop the run.
inline std::vector<CalibrationEntry> calibrate_anchors(const PotentialSpec& pot, LHatMethod method,
                                                       const std::vector<int>& Ns, int state_index,
                                                       const std::function<PrecisionContext(int)>& ctx_for,
                                                       FindOptions opts = {}) {
  if (Ns.empty()) throw Error(Errc::InvalidArgument, "optimize", "N list is empty");
  for (std::size_t i = 1; i < Ns.size(); ++i)
    if (Ns[i] <= Ns[i - 1]) throw Error(Errc::InvalidArgument, "optimize", "N list must be strictly ascending");
  std::vector<CalibrationEntry> out;
  std::vector<LHatAnchor> found;
  const std::optional<LBracket> user_bracket = opts.bracket;
  for (int N : Ns) {
    const PrecisionContext ctx = ctx_for(N);
    CalibrationEntry entry{N, std::nullopt, {}};
    std::vector<FindOptions> attempts;
    if (!user_bracket && found.size() >= 2) {
      PrecisionScope scope(ctx);
      const auto& p = found[found.size() - 2];
      const auto& q = found.back();
      const HPReal b = log(q.L_hat / p.L_hat) / log(HPReal(q.N) / p.N);
      const HPReal guess = at_precision(q.L_hat, ctx) * pow(HPReal(N) / q.N, b);
      FindOptions narrow = opts;
      narrow.bracket = LBracket{guess * 4 / 5, guess * 5 / 4};
      narrow.scan_samples = std::max(9, opts.scan_samples / 2);
      attempts.push_back(narrow);
    }
    attempts.push_back(opts);
    for (const auto& attempt : attempts) {
      try {
        entry.anchor = find_L_hat(pot, method, N, state_index, ctx, attempt);
        entry.error.clear();
        break;
      } catch (const Error& e) {
        if (e.code() != Errc::BracketInvalid) throw;
        entry.error = e.what();
      }
    }
    if (entry.anchor) found.push_back(*entry.anchor);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace vism
