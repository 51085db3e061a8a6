#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vism/interpolant.hpp"
#include "vism/optimize.hpp"
#include "vism/potential.hpp"

namespace vism {

/// A potential that ships with a precomputed L_hat(N) anchor set.
struct NamedPotential {
  std::string_view name;
  std::string_view expression;
  InflectionPick pick;
  std::string_view anchors_csv;  // N,L_hat rows, periodic inflection
};

namespace detail {

// Periodic-inflection anchors, each computed at max(30, 30 + 1.6 N) digits
// (60 digits for the oscillating potential).
inline constexpr std::string_view kShoAnchors = R"(1,2.5247911279479581917
2,3.0463469702178629407
3,3.5123058213605107210
4,3.9294959491396339233
5,4.3084229010690313880
6,4.6574387923653691039
7,4.9824534427016312345
8,5.2877524025253501060
9,5.5764915702226249037
10,5.8510870448718314851
12,6.3649871978038272555
15,7.0663030332787011789
20,8.1015766008199832481
25,9.0188987906600076078
30,9.8512205603229181744
40,11.334024776453517760
50,12.644153473831632804
60,13.830750518381293052
70,14.923305212899485037
80,15.941154056193869108
)";

inline constexpr std::string_view kQuarticAnchors = R"(8,4.5522547635312298870
9,4.8594610784631763950
10,5.3302906682810962639
12,5.4051676813328523560
15,5.8829372391833170295
20,6.3852130654879413054
25,6.8343023916086027424
30,7.2394684214080730831
40,7.9495438634322493282
50,8.8489506510647498718
70,9.4861461859948761772
)";

inline constexpr std::string_view kRapidAnchors = R"(50,4.1011625925699869792
60,5.2700116800299022615
70,5.5448029769157086248
80,6.7138339368109571348
100,8.0868072891418698411
120,9.3788068732392151414
)";

}  // namespace detail

inline constexpr NamedPotential kNamedPotentials[] = {
    {"sho", "x^2", InflectionPick::Flattest, detail::kShoAnchors},
    {"quartic", "x^2 + 0.1*x^4", InflectionPick::Flattest, detail::kQuarticAnchors},
    {"rapid", "x^2 + 10*cos(10*pi*x)", InflectionPick::LowestBranch, detail::kRapidAnchors},
};

/// Matches by name or by canonical form of the expression.
inline std::optional<NamedPotential> find_named_potential(std::string_view name_or_expression) {
  for (const auto& p : kNamedPotentials)
    if (p.name == name_or_expression) return p;
  std::string canonical;
  try {
    canonical = parse_potential(name_or_expression).to_string();
  } catch (const Error&) {
    return std::nullopt;
  }
  for (const auto& p : kNamedPotentials)
    if (parse_potential(p.expression).to_string() == canonical) return p;
  return std::nullopt;
}

/// Resolves a name such as "quartic" to its expression; anything else is
/// returned unchanged.
inline std::string expand_potential_name(std::string_view text) {
  for (const auto& p : kNamedPotentials)
    if (p.name == text) return std::string(p.expression);
  return std::string(text);
}

inline std::vector<LHatAnchor> builtin_anchors(const NamedPotential& p, const PrecisionContext& ctx) {
  std::istringstream is{std::string(p.anchors_csv)};
  return read_anchor_csv(is, ctx);
}

inline std::optional<LHatInterpolant> builtin_interpolant(std::string_view name_or_expression,
                                                          const PrecisionContext& ctx) {
  const auto p = find_named_potential(name_or_expression);
  if (!p) return std::nullopt;
  auto anchors = builtin_anchors(*p, ctx);
  if (anchors.size() < 3) return std::nullopt;
  return build_interpolant(std::move(anchors));
}

}  // namespace vism
