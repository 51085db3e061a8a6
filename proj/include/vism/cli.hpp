#pragma once

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vism/calibration.hpp"
#include "vism/eigen.hpp"
#include "vism/errors.hpp"
#include "vism/optimize.hpp"
#include "vism/reference.hpp"
#include "vism/solution.hpp"

namespace vism::cli {

enum class OutputFormat { Csv, Json };

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw Error(Errc::ConfigError, "cli", "format must be csv or json, got '" + std::string(s) + "'");
}

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

inline InflectionPick parse_pick(std::string_view s) {
  if (s == "flattest") return InflectionPick::Flattest;
  if (s == "lowest-branch") return InflectionPick::LowestBranch;
  throw Error(Errc::ConfigError, "cli", "pick must be flattest or lowest-branch, got '" + std::string(s) + "'");
}

inline std::string_view to_string(InflectionPick p) {
  return p == InflectionPick::Flattest ? "flattest" : "lowest-branch";
}

struct RunConfig {
  std::string command = "solve";  // solve | scan-l | calibrate | compare
  std::string potential = "x^2";  // canonical expression or a built-in name
  BoundaryMode mode = BoundaryMode::Periodic;
  int N = 10;
  std::string L = "auto";
  unsigned precision = 30;
  int states = 1;
  OutputFormat format = OutputFormat::Csv;
  std::string out;      // empty writes to stdout
  std::string anchors;  // anchor CSV for L = auto
  LHatMethod method = LHatMethod::EnergyInflectionPeriodic;
  std::optional<ReferenceKind> reference;
  std::optional<InflectionPick> pick;  // default: the built-in choice, else flattest
  bool estimate = true;                // delta_E_hat per state
  bool timing = true;                  // wall time in the record; off gives byte-identical reruns
  int M = 1001;
  bool grow_precision = true;  // calibrate: raise digits with N (calibration_digits)
  // scan-l and calibrate
  std::optional<std::string> L_min, L_max;
  int samples = 21;
  std::vector<int> N_list;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) { throw Error(Errc::ConfigError, "cli", msg); }

template <class T>
T json_get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Reads a JSON document whose keys mirror RunConfig (N_list, L_min,
/// L_max use those spellings). Unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig cfg = {}) {
  using detail::json_get;
  if (!j.is_object()) detail::config_error("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") cfg.command = json_get<std::string>(j, "command");
    else if (key == "potential") cfg.potential = json_get<std::string>(j, "potential");
    else if (key == "mode") cfg.mode = parse_boundary_mode(json_get<std::string>(j, "mode"));
    else if (key == "N") cfg.N = json_get<int>(j, "N");
    else if (key == "L") cfg.L = value.is_number() ? value.dump() : json_get<std::string>(j, "L");
    else if (key == "precision") cfg.precision = json_get<unsigned>(j, "precision");
    else if (key == "states") cfg.states = json_get<int>(j, "states");
    else if (key == "format") cfg.format = parse_format(json_get<std::string>(j, "format"));
    else if (key == "out") cfg.out = json_get<std::string>(j, "out");
    else if (key == "anchors") cfg.anchors = json_get<std::string>(j, "anchors");
    else if (key == "method") cfg.method = parse_lhat_method(json_get<std::string>(j, "method"));
    else if (key == "reference") cfg.reference = parse_reference_kind(json_get<std::string>(j, "reference"));
    else if (key == "pick") cfg.pick = parse_pick(json_get<std::string>(j, "pick"));
    else if (key == "estimate") cfg.estimate = json_get<bool>(j, "estimate");
    else if (key == "timing") cfg.timing = json_get<bool>(j, "timing");
    else if (key == "M") cfg.M = json_get<int>(j, "M");
    else if (key == "grow_precision") cfg.grow_precision = json_get<bool>(j, "grow_precision");
    else if (key == "L_min") cfg.L_min = json_get<std::string>(j, "L_min");
    else if (key == "L_max") cfg.L_max = json_get<std::string>(j, "L_max");
    else if (key == "samples") cfg.samples = json_get<int>(j, "samples");
    else if (key == "N_list") cfg.N_list = json_get<std::vector<int>>(j, "N_list");
    else detail::config_error("unknown config key '" + key + "'");
  }
  return cfg;
}

inline RunConfig load_config_file(const std::string& path, RunConfig cfg = {}) {
  std::ifstream is(path);
  if (!is) detail::config_error("cannot open config file '" + path + "'");
  try {
    return config_from_json(nlohmann::json::parse(is), std::move(cfg));
  } catch (const nlohmann::json::parse_error& e) {
    detail::config_error("config file '" + path + "': " + e.what());
  }
}

/// Checks everything that can be checked without numerical work.
inline void validate(const RunConfig& cfg) {
  using detail::config_error;
  if (cfg.command != "solve" && cfg.command != "scan-l" && cfg.command != "calibrate" && cfg.command != "compare")
    config_error("unknown command '" + cfg.command + "'");
  try {
    parse_potential(expand_potential_name(cfg.potential));
  } catch (const Error& e) {
    config_error(std::string("potential: ") + e.what());
  }
  if (cfg.N < 1) config_error("N must be >= 1");
  if (cfg.precision < PrecisionContext::kMinDigits)
    config_error("precision must be at least " + std::to_string(PrecisionContext::kMinDigits) + " digits");
  if (cfg.states < 1) config_error("states must be >= 1");
  if (cfg.states > 2 * cfg.N + 1) config_error("states exceeds the basis size 2N+1");
  if (cfg.M < 2) config_error("M must be >= 2");
  if (cfg.L != "auto") {
    try {
      if (!(parse_decimal(cfg.L, PrecisionContext(cfg.precision)) > 0)) config_error("L must be positive");
    } catch (const Error& e) {
      if (e.code() == Errc::ConfigError) throw;
      config_error("L must be a decimal number or 'auto', got '" + cfg.L + "'");
    }
  }
  const bool needs_anchor_source = cfg.L == "auto" && cfg.command != "calibrate" && cfg.command != "scan-l";
  if (needs_anchor_source && cfg.anchors.empty() && !find_named_potential(cfg.potential))
    config_error("L = auto needs --anchors or a potential with a built-in calibration (sho, quartic, rapid)");
  if (cfg.command == "scan-l") {
    if (cfg.samples < 5) config_error("scan-l needs at least 5 samples");
    if (!cfg.L_min || !cfg.L_max) config_error("scan-l needs --L-min and --L-max");
  }
  if (cfg.command == "calibrate" && cfg.N_list.empty()) config_error("calibrate needs a non-empty N list");
  for (std::size_t i = 1; i < cfg.N_list.size(); ++i)
    if (cfg.N_list[i] <= cfg.N_list[i - 1]) config_error("N list must be strictly ascending");
  for (int n : cfg.N_list)
    if (n < 1) config_error("N list entries must be >= 1");
  if (cfg.command == "compare" && !cfg.reference) config_error("compare needs --reference");
}

/// 2 for configuration problems, 3 for numerical failures.
inline int exit_code_for(Errc e) {
  switch (e) {
    case Errc::ConfigError:
    case Errc::ParseError:
    case Errc::InvalidArgument:
    case Errc::IndexOutOfRange:
    case Errc::UnsupportedExponent:
    case Errc::UnsupportedOrder:
    case Errc::ReferenceRequired:
    case Errc::ReferenceUnavailable:
    case Errc::InsufficientAnchors:
    case Errc::NonMonotoneAnchors:
      return 2;
    default:
      return 3;
  }
}

struct StateRow {
  int n = 0;
  std::string energy;
  std::string parity;  // even | odd | "" when not blocked
  std::optional<std::string> delta_E_hat, delta_E, delta_psi, reference_energy, relative_difference;
};

struct ResultRecord {
  std::string command;
  std::string potential;
  std::string mode;
  int N = 0;
  std::string L;
  unsigned precision = 0;
  std::optional<double> wall_time_s;
  std::vector<StateRow> rows;
};

namespace detail {

inline std::string sci(const HPReal& x) { return to_decimal(x, 6); }

inline LHatInterpolant interpolant_for(const RunConfig& cfg, const PrecisionContext& ctx) {
  if (!cfg.anchors.empty()) {
    std::ifstream is(cfg.anchors);
    if (!is) config_error("cannot open anchor file '" + cfg.anchors + "'");
    return build_interpolant(read_anchor_csv(is, ctx));
  }
  auto built = builtin_interpolant(cfg.potential, ctx);
  if (!built) config_error("no built-in calibration for '" + cfg.potential + "'");
  return *built;
}

/// L for truncation N: the fixed value, or the interpolant.
inline std::function<HPReal(int)> L_rule(const RunConfig& cfg, const PrecisionContext& ctx) {
  if (cfg.L != "auto") {
    const HPReal L = parse_decimal(cfg.L, ctx);
    return [L](int) { return L; };
  }
  auto f = std::make_shared<LHatInterpolant>(interpolant_for(cfg, ctx));
  return [f, ctx](int N) { return at_precision((*f)(N), ctx); };
}

inline std::optional<ReferenceSolution> reference_for(const RunConfig& cfg, const PotentialSpec& pot,
                                                      const PrecisionContext& ctx) {
  if (!cfg.reference) return std::nullopt;
  return make_reference(*cfg.reference, pot, ctx);
}

inline ResultRecord record_header(const RunConfig& cfg, const PotentialSpec& pot) {
  ResultRecord r;
  r.command = cfg.command;
  r.potential = pot.to_string();
  r.mode = std::string(to_string(cfg.mode));
  r.N = cfg.N;
  r.precision = cfg.precision;
  return r;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

namespace detail {

inline ResultRecord solve_record(const RunConfig& cfg, bool compare) {
  validate(cfg);
  const Stopwatch clock;
  const PrecisionContext ctx(cfg.precision);
  PrecisionScope scope(ctx);
  const PotentialSpec pot = parse_potential(expand_potential_name(cfg.potential));
  const auto L_of = L_rule(cfg, ctx);
  const HPReal L = L_of(cfg.N);
  const auto ref = reference_for(cfg, pot, ctx);
  const bool want_psi = !compare && ref && ref->psi;
  const Spectrum s = solve(BasisSpec(cfg.mode, cfg.N, L), pot, ctx, {want_psi, true});
  std::optional<Spectrum> next;
  if (cfg.estimate && !compare) next = solve(BasisSpec(cfg.mode, cfg.N + 1, L_of(cfg.N + 1)), pot, ctx, {false, true});

  ResultRecord r = record_header(cfg, pot);
  r.L = to_decimal(L, cfg.precision);
  for (int n = 0; n < cfg.states; ++n) {
    const auto k = static_cast<std::size_t>(n);
    const HPReal& e = s.eigenvalues[k];
    StateRow row;
    row.n = n;
    row.energy = to_decimal(e, cfg.precision);
    if (!s.parity.empty()) row.parity = std::string(to_string(s.parity[k]));
    if (next) row.delta_E_hat = sci(relative_change(e, next->eigenvalues[k]));
    if (ref) {
      const HPReal exact = ref->energy(n);
      row.reference_energy = to_decimal(exact, cfg.precision);
      if (compare) {
        if (e == 0) throw Error(Errc::DivisionByZero, "cli", "SM energy is zero");
        row.relative_difference = sci(abs(exact - e) / abs(e));
        r.rows.push_back(std::move(row));
        continue;
      }
      BoundState st;
      st.energy = e;
      row.delta_E = sci(delta_E_exact(st, exact));
      if (want_psi) {
        const auto psi = [&](const HPReal& y) { return ref->psi(n, y); };
        row.delta_psi = sci(delta_psi_exact(bound_state(s, n), psi, cfg.M));
      }
    }
    r.rows.push_back(std::move(row));
  }
  if (cfg.timing) r.wall_time_s = clock.seconds();
  return r;
}

}  // namespace detail

/// One assembly and one diagonalisation; every requested state comes from
/// the same spectrum. With `estimate`, a second solve at N+1 (on the same
/// L rule) supplies delta_E_hat.
inline ResultRecord cmd_solve(const RunConfig& cfg) { return detail::solve_record(cfg, false); }

/// SM energies next to a reference, with |E_ref - E| / |E| per state.
inline ResultRecord cmd_compare(const RunConfig& cfg) { return detail::solve_record(cfg, true); }

inline void write_record(std::ostream& os, const ResultRecord& r, OutputFormat f) {
  if (f == OutputFormat::Json) {
    nlohmann::ordered_json j;
    j["command"] = r.command;
    j["potential"] = r.potential;
    j["mode"] = r.mode;
    j["N"] = r.N;
    j["L"] = r.L;
    j["precision"] = r.precision;
    if (r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
    j["states"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
      nlohmann::ordered_json s;
      s["n"] = row.n;
      s["energy"] = row.energy;
      if (!row.parity.empty()) s["parity"] = row.parity;
      if (row.delta_E_hat) s["delta_E_hat"] = *row.delta_E_hat;
      if (row.reference_energy) s["reference_energy"] = *row.reference_energy;
      if (row.delta_E) s["delta_E"] = *row.delta_E;
      if (row.delta_psi) s["delta_psi"] = *row.delta_psi;
      if (row.relative_difference) s["relative_difference"] = *row.relative_difference;
      j["states"].push_back(std::move(s));
    }
    os << j.dump(2) << '\n';
    return;
  }
  os << "# command: " << r.command << "\n# potential: " << r.potential << "\n# mode: " << r.mode << "\n# N: " << r.N
     << "\n# L: " << r.L << "\n# precision: " << r.precision << '\n';
  if (r.wall_time_s) os << "# wall_time_s: " << *r.wall_time_s << '\n';
  const bool any_hat = !r.rows.empty() && r.rows[0].delta_E_hat;
  const bool any_ref = !r.rows.empty() && r.rows[0].reference_energy;
  const bool any_psi = !r.rows.empty() && r.rows[0].delta_psi;
  const bool any_diff = !r.rows.empty() && r.rows[0].relative_difference;
  os << "n,energy,parity";
  if (any_hat) os << ",delta_E_hat";
  if (any_ref) os << ",reference_energy";
  if (any_ref && !any_diff) os << ",delta_E";
  if (any_psi) os << ",delta_psi";
  if (any_diff) os << ",relative_difference";
  os << '\n';
  for (const auto& row : r.rows) {
    os << row.n << ',' << row.energy << ',' << row.parity;
    if (any_hat) os << ',' << row.delta_E_hat.value_or("");
    if (any_ref) os << ',' << row.reference_energy.value_or("");
    if (any_ref && !any_diff) os << ',' << row.delta_E.value_or("");
    if (any_psi) os << ',' << row.delta_psi.value_or("");
    if (any_diff) os << ',' << row.relative_difference.value_or("");
    os << '\n';
  }
}

/// E_n(L) on a uniform L grid for N, or for each N of N_list (a 2-D
/// sweep). With a reference, delta_E columns are added. Minima and
/// inflections of E_0(L) are flagged per N.
inline void cmd_scan_l(const RunConfig& cfg, std::ostream& os) {
  validate(cfg);
  const detail::Stopwatch clock;
  const PrecisionContext ctx(cfg.precision);
  PrecisionScope scope(ctx);
  const PotentialSpec pot = parse_potential(expand_potential_name(cfg.potential));
  const auto ref = detail::reference_for(cfg, pot, ctx);
  const HPReal lo = parse_decimal(*cfg.L_min, ctx), hi = parse_decimal(*cfg.L_max, ctx);
  if (!(lo > 0) || !(hi > lo)) detail::config_error("L range must satisfy 0 < L_min < L_max");
  const std::vector<int> Ns = cfg.N_list.empty() ? std::vector<int>{cfg.N} : cfg.N_list;

  nlohmann::ordered_json doc;
  doc["command"] = "scan-l";
  doc["potential"] = pot.to_string();
  doc["mode"] = to_string(cfg.mode);
  doc["precision"] = cfg.precision;
  doc["scans"] = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "N,L";
  for (int n = 0; n < cfg.states; ++n) csv << ",E_" << n;
  if (ref)
    for (int n = 0; n < cfg.states; ++n) csv << ",delta_E_" << n;
  csv << '\n';
  std::ostringstream notes;

  for (int N : Ns) {
    if (cfg.states > 2 * N + 1) detail::config_error("states exceeds the basis size at N=" + std::to_string(N));
    std::vector<ScanSample> ground;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < cfg.samples; ++i) {
      const HPReal L = i == cfg.samples - 1 ? hi : HPReal(lo + (hi - lo) * i / (cfg.samples - 1));
      const Spectrum s = solve(BasisSpec(cfg.mode, N, L), pot, ctx, {false, true});
      ground.push_back({L, s.eigenvalues[0]});
      nlohmann::ordered_json row;
      row["L"] = to_decimal(L, 12);
      csv << N << ',' << to_decimal(L, 12);
      std::vector<std::string> es, ds;
      for (int n = 0; n < cfg.states; ++n) {
        const HPReal& e = s.eigenvalues[static_cast<std::size_t>(n)];
        es.push_back(to_decimal(e, cfg.precision));
        csv << ',' << es.back();
      }
      row["E"] = es;
      if (ref) {
        for (int n = 0; n < cfg.states; ++n) {
          BoundState st;
          st.energy = s.eigenvalues[static_cast<std::size_t>(n)];
          ds.push_back(detail::sci(delta_E_exact(st, ref->energy(n))));
          csv << ',' << ds.back();
        }
        row["delta_E"] = ds;
      }
      csv << '\n';
      rows.push_back(std::move(row));
    }
    const auto feats = detect_features(ground);
    nlohmann::ordered_json scan;
    scan["N"] = N;
    scan["minima"] = nlohmann::ordered_json::array();
    scan["inflections"] = nlohmann::ordered_json::array();
    for (auto i : feats.minima) {
      scan["minima"].push_back(to_decimal(ground[i].L, 12));
      notes << "# N=" << N << " minimum near L=" << to_decimal(ground[i].L, 8) << '\n';
    }
    for (auto i : feats.inflections) {
      nlohmann::ordered_json range = {to_decimal(ground[i].L, 12), to_decimal(ground[i + 1].L, 12)};
      scan["inflections"].push_back(range);
      notes << "# N=" << N << " inflection between L=" << to_decimal(ground[i].L, 8) << " and "
            << to_decimal(ground[i + 1].L, 8) << '\n';
    }
    scan["rows"] = std::move(rows);
    doc["scans"].push_back(std::move(scan));
  }
  if (cfg.timing) doc["wall_time_s"] = clock.seconds();

  if (cfg.format == OutputFormat::Json) {
    os << doc.dump(2) << '\n';
    return;
  }
  os << "# command: scan-l\n# potential: " << pot.to_string() << "\n# mode: " << to_string(cfg.mode)
     << "\n# precision: " << cfg.precision << '\n';
  if (cfg.timing) os << "# wall_time_s: " << doc["wall_time_s"].get<double>() << '\n';
  os << notes.str() << csv.str();
}

/// Runs find_L_hat for every N of N_list and writes the anchors plus the
/// power-law tail of the resulting interpolant. Returns false when some N
/// failed; the anchors that were found are still written.
inline bool cmd_calibrate(const RunConfig& cfg, std::ostream& os) {
  validate(cfg);
  const detail::Stopwatch clock;
  const PrecisionContext ctx(cfg.precision);
  PrecisionScope scope(ctx);
  const PotentialSpec pot = parse_potential(expand_potential_name(cfg.potential));
  const auto ref = detail::reference_for(cfg, pot, ctx);
  FindOptions opts;
  opts.error_mode = cfg.mode;
  opts.M = cfg.M;
  if (ref) opts.reference = &*ref;
  const auto named = find_named_potential(cfg.potential);
  opts.pick = cfg.pick.value_or(named ? named->pick : InflectionPick::Flattest);
  if (cfg.L_min && cfg.L_max) opts.bracket = LBracket{parse_decimal(*cfg.L_min, ctx), parse_decimal(*cfg.L_max, ctx)};
  const unsigned floor = cfg.precision;
  const bool grow = cfg.grow_precision;
  const auto entries = calibrate_anchors(
      pot, cfg.method, cfg.N_list, 0,
      [floor, grow](int N) { return PrecisionContext(grow ? calibration_digits(N, floor) : floor); }, opts);

  std::vector<LHatAnchor> found;
  std::vector<std::pair<int, std::string>> failed;
  for (const auto& e : entries) {
    if (e.anchor)
      found.push_back(*e.anchor);
    else
      failed.emplace_back(e.N, e.error);
  }
  std::optional<LHatInterpolant> fit;
  std::string fit_error;
  try {
    if (found.size() >= 3) fit = build_interpolant(found);
  } catch (const Error& e) {
    fit_error = e.what();
  }
  const double seconds = clock.seconds();

  if (cfg.format == OutputFormat::Json) {
    nlohmann::ordered_json j;
    j["command"] = "calibrate";
    j["potential"] = pot.to_string();
    j["method"] = to_string(cfg.method);
    j["pick"] = to_string(opts.pick);
    if (cfg.timing) j["wall_time_s"] = seconds;
    j["anchors"] = nlohmann::ordered_json::array();
    for (const auto& a : found) j["anchors"].push_back({{"N", a.N}, {"L_hat", to_decimal(a.L_hat, 20)}});
    if (fit) j["power_law"] = {{"a", to_decimal(fit->power_law_a(), 12)}, {"b", to_decimal(fit->power_law_b(), 12)}};
    if (!fit_error.empty()) j["interpolant_error"] = fit_error;
    j["failures"] = nlohmann::ordered_json::array();
    for (const auto& [N, msg] : failed) j["failures"].push_back({{"N", N}, {"error", msg}});
    os << j.dump(2) << '\n';
  } else {
    write_anchor_csv(os, found, 20);
    if (fit)
      os << "# power_law L_hat = a N^b beyond the last anchor: a=" << to_decimal(fit->power_law_a(), 12)
         << " b=" << to_decimal(fit->power_law_b(), 12) << '\n';
    if (!fit_error.empty()) os << "# interpolant: " << fit_error << '\n';
    for (const auto& [N, msg] : failed) os << "# failed N=" << N << ": " << msg << '\n';
    if (cfg.timing) os << "# wall_time_s: " << seconds << '\n';
  }
  return failed.empty();
}

/// Runs cfg.command, writing to cfg.out or `fallback`. Returns the exit code.
inline int run(const RunConfig& cfg, std::ostream& fallback, std::ostream& err) {
  try {
    validate(cfg);
    std::ofstream file;
    if (!cfg.out.empty()) {
      file.open(cfg.out);
      if (!file) detail::config_error("cannot open output file '" + cfg.out + "'");
    }
    std::ostream& os = cfg.out.empty() ? fallback : file;
    if (cfg.command == "solve") write_record(os, cmd_solve(cfg), cfg.format);
    else if (cfg.command == "compare") write_record(os, cmd_compare(cfg), cfg.format);
    else if (cfg.command == "scan-l") cmd_scan_l(cfg, os);
    else if (!cmd_calibrate(cfg, os)) {
      err << "error: calibration failed for some N (see output)\n";
      return 3;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace vism::cli
