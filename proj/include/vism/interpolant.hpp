#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vism/errors.hpp"
#include "vism/numeric.hpp"

namespace vism {

/// Ways of locating the optimal half-length for a truncation N.
enum class LHatMethod {
  EnergyMinConfinement,      // minimum of E(L), confinement basis
  EnergyInflectionPeriodic,  // inflection point of E(L), periodic basis
  EnergyErrorMin,            // minimum of |E(L) - E_ref| / |E_ref|
  WavefunctionErrorMin,      // minimum of the grid wavefunction error
  EstimatorMin,              // experimental: minimum of |E_N(L) - E_N+1(L)| / |E_N+1(L)|
};

inline constexpr LHatMethod kLHatCriteria[] = {LHatMethod::EnergyMinConfinement, LHatMethod::EnergyInflectionPeriodic,
                                               LHatMethod::EnergyErrorMin, LHatMethod::WavefunctionErrorMin};

inline std::string_view to_string(LHatMethod m) {
  switch (m) {
    case LHatMethod::EnergyMinConfinement: return "energy-min-confinement";
    case LHatMethod::EnergyInflectionPeriodic: return "energy-inflection-periodic";
    case LHatMethod::EnergyErrorMin: return "energy-error-min";
    case LHatMethod::WavefunctionErrorMin: return "wavefunction-error-min";
    case LHatMethod::EstimatorMin: return "estimator-min";
  }
  return "?";
}

inline LHatMethod parse_lhat_method(std::string_view s) {
  static constexpr std::pair<std::string_view, LHatMethod> aliases[] = {
      {"EnergyMinConfinement", LHatMethod::EnergyMinConfinement},
      {"EnergyInflectionPeriodic", LHatMethod::EnergyInflectionPeriodic},
      {"EnergyErrorMin", LHatMethod::EnergyErrorMin},
      {"WavefunctionErrorMin", LHatMethod::WavefunctionErrorMin},
      {"EstimatorMin", LHatMethod::EstimatorMin},
  };
  for (LHatMethod m : {LHatMethod::EnergyMinConfinement, LHatMethod::EnergyInflectionPeriodic,
                       LHatMethod::EnergyErrorMin, LHatMethod::WavefunctionErrorMin, LHatMethod::EstimatorMin})
    if (s == to_string(m)) return m;
  for (const auto& [name, m] : aliases)
    if (s == name) return m;
  throw Error(Errc::ParseError, "optimize", "unknown L-hat method '" + std::string(s) + "'");
}

struct LHatAnchor {
  int N = 1;
  HPReal L_hat;
  LHatMethod method = LHatMethod::EnergyInflectionPeriodic;
  int state_index = 0;
};

/// Monotone piecewise-cubic (PCHIP) through the anchors, with a power law
/// a N^b fitted to the last three anchors beyond the last one.
class LHatInterpolant {
 public:
  LHatInterpolant() = default;

  const std::vector<LHatAnchor>& anchors() const noexcept { return anchors_; }
  const HPReal& power_law_a() const noexcept { return a_; }
  const HPReal& power_law_b() const noexcept { return b_; }
  int first_N() const { return anchors_.front().N; }
  int last_N() const { return anchors_.back().N; }

  HPReal operator()(int N) const { return (*this)(HPReal(N, anchors_.front().L_hat.precision())); }

  HPReal operator()(const HPReal& N) const {
    if (N < anchors_.front().N)
      throw Error(Errc::InvalidArgument, "optimize",
                  "N below the calibrated range (first anchor N=" + std::to_string(first_N()) + ")");
    if (N > anchors_.back().N) return a_ * pow(N, b_);
    std::size_t k = 0;
    while (k + 2 < anchors_.size() && N > anchors_[k + 1].N) ++k;
    const HPReal h = HPReal(anchors_[k + 1].N - anchors_[k].N);
    const HPReal t = (N - anchors_[k].N) / h;
    const HPReal u = 1 - t;
    const HPReal h00 = (1 + 2 * t) * u * u, h10 = t * u * u, h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * anchors_[k].L_hat + h10 * h * slopes_[k] + h01 * anchors_[k + 1].L_hat + h11 * h * slopes_[k + 1];
  }

  /// Builds from at least three anchors of one method with strictly
  /// increasing N and non-decreasing L_hat.
  static LHatInterpolant build(std::vector<LHatAnchor> anchors) {
    if (anchors.size() < 3)
      throw Error(Errc::InsufficientAnchors, "optimize", "need at least 3 anchors, got " + std::to_string(anchors.size()));
    for (std::size_t i = 1; i < anchors.size(); ++i) {
      if (anchors[i].method != anchors[0].method)
        throw Error(Errc::InvalidArgument, "optimize", "anchors must come from a single method");
      if (anchors[i].N <= anchors[i - 1].N)
        throw Error(Errc::NonMonotoneAnchors, "optimize", "anchor N values must be strictly increasing");
      if (anchors[i].L_hat < anchors[i - 1].L_hat)
        throw Error(Errc::NonMonotoneAnchors, "optimize",
                    "L_hat decreases between N=" + std::to_string(anchors[i - 1].N) + " and N=" +
                        std::to_string(anchors[i].N));
    }
    for (const auto& a : anchors)
      if (!(a.L_hat > 0)) throw Error(Errc::InvalidArgument, "optimize", "anchor L_hat must be positive");

    LHatInterpolant out;
    out.anchors_ = std::move(anchors);
    out.compute_slopes();
    out.fit_power_law();
    return out;
  }

 private:
  // Fritsch–Butland weighted harmonic mean inside, shape-preserving
  // three-point formula at the ends.
  void compute_slopes() {
    const std::size_t n = anchors_.size();
    std::vector<HPReal> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = HPReal(anchors_[k + 1].N - anchors_[k].N);
      delta[k] = (anchors_[k + 1].L_hat - anchors_[k].L_hat) / h[k];
    }
    slopes_.assign(n, HPReal(0));
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (delta[k - 1] * delta[k] <= 0) continue;
      const HPReal w1 = 2 * h[k] + h[k - 1], w2 = h[k] + 2 * h[k - 1];
      slopes_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    auto edge = [](const HPReal& h0, const HPReal& h1, const HPReal& d0, const HPReal& d1) {
      HPReal d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (d * d0 <= 0) return HPReal(0 * d);
      if (d0 * d1 <= 0 && abs(d) > 3 * abs(d0)) return HPReal(3 * d0);
      return d;
    };
    slopes_[0] = edge(h[0], h[1], delta[0], delta[1]);
    slopes_[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  // least squares in log-log over the last three anchors
  void fit_power_law() {
    const std::size_t n = anchors_.size();
    HPReal sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = n - 3; i < n; ++i) {
      const HPReal x = log(HPReal(anchors_[i].N, anchors_[i].L_hat.precision()));
      const HPReal y = log(anchors_[i].L_hat);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    b_ = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    a_ = exp((sy - b_ * sx) / 3);
  }

  std::vector<LHatAnchor> anchors_;
  std::vector<HPReal> slopes_;
  HPReal a_ = 0, b_ = 0;
};

inline LHatInterpolant build_interpolant(std::vector<LHatAnchor> anchors) {
  return LHatInterpolant::build(std::move(anchors));
}

/// CSV with header N,L_hat,method,state_index.
inline void write_anchor_csv(std::ostream& os, const std::vector<LHatAnchor>& anchors, unsigned digits) {
  os << "N,L_hat,method,state_index\n";
  for (const auto& a : anchors)
    os << a.N << ',' << to_decimal(a.L_hat, digits) << ',' << to_string(a.method) << ',' << a.state_index << '\n';
}

inline std::vector<LHatAnchor> read_anchor_csv(std::istream& is, const PrecisionContext& ctx) {
  std::vector<LHatAnchor> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("N,", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() < 2 || f.size() > 4)
      throw Error(Errc::ParseError, "optimize", "anchor CSV line " + std::to_string(lineno) + ": expected 2-4 fields");
    LHatAnchor a;
    try {
      a.N = std::stoi(f[0]);
      if (f.size() > 3) a.state_index = std::stoi(f[3]);
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "optimize", "anchor CSV line " + std::to_string(lineno) + ": bad integer");
    }
    a.L_hat = parse_decimal(f[1], ctx);
    if (f.size() > 2 && !f[2].empty()) a.method = parse_lhat_method(f[2]);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace vism
