#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "vism/cli.hpp"

namespace {

struct Flags {
  std::string config, potential, mode, L, format, out, anchors, method, reference, pick, L_min, L_max, N_list;
  int N = 0, states = 0, M = 0, samples = 0;
  unsigned precision = 0;
  bool no_estimate = false, no_timing = false, fixed_precision = false;
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw vism::Error(vism::Errc::ConfigError, "cli", "bad N list entry '" + cell + "'");
    }
  }
  return out;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON file with RunConfig keys; flags override it");
  cmd->add_option("--potential", f.potential, "e.g. 'x^2 + 0.1*x^4', or sho | quartic | rapid");
  cmd->add_option("--mode", f.mode, "periodic | confinement");
  cmd->add_option("-N", f.N, "truncation order (basis size 2N+1)");
  cmd->add_option("--L", f.L, "half-length, or 'auto' for the calibrated L_hat(N)");
  cmd->add_option("--precision", f.precision, "decimal digits");
  cmd->add_option("--states", f.states, "number of eigenpairs to report");
  cmd->add_option("--format", f.format, "csv | json");
  cmd->add_option("--anchors", f.anchors, "anchor CSV used by --L auto");
  cmd->add_option("--method", f.method, "L_hat method (calibrate)");
  cmd->add_option("--reference", f.reference, "exact | perturbation0 | perturbation1");
  cmd->add_option("--out", f.out, "output file (default stdout)");
  cmd->add_option("-M", f.M, "grid points for the wavefunction error");
  cmd->add_flag("--no-timing", f.no_timing, "omit wall time so reruns are byte-identical");
}

vism::cli::RunConfig build_config(const std::string& command, const Flags& f, const CLI::App& sub) {
  using namespace vism;
  cli::RunConfig cfg;
  if (!f.config.empty()) cfg = cli::load_config_file(f.config);
  cfg.command = command;
  const auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--potential")) cfg.potential = f.potential;
  if (given("--mode")) cfg.mode = parse_boundary_mode(f.mode);
  if (given("-N")) cfg.N = f.N;
  if (given("--L")) cfg.L = f.L;
  if (given("--precision")) cfg.precision = f.precision;
  if (given("--states")) cfg.states = f.states;
  if (given("--format")) cfg.format = cli::parse_format(f.format);
  if (given("--anchors")) cfg.anchors = f.anchors;
  if (given("--method")) cfg.method = parse_lhat_method(f.method);
  if (given("--reference")) cfg.reference = parse_reference_kind(f.reference);
  if (given("--out")) cfg.out = f.out;
  if (given("-M")) cfg.M = f.M;
  if (f.no_timing) cfg.timing = false;
  if (f.no_estimate) cfg.estimate = false;
  if (f.fixed_precision) cfg.grow_precision = false;
  if (sub.get_option_no_throw("--L-min") && given("--L-min")) cfg.L_min = f.L_min;
  if (sub.get_option_no_throw("--L-max") && given("--L-max")) cfg.L_max = f.L_max;
  if (sub.get_option_no_throw("--samples") && given("--samples")) cfg.samples = f.samples;
  if (sub.get_option_no_throw("--N-list") && given("--N-list")) cfg.N_list = parse_int_list(f.N_list);
  if (sub.get_option_no_throw("--pick") && given("--pick")) cfg.pick = cli::parse_pick(f.pick);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variationally improved spectral solver for the 1-D Schroedinger equation"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "assemble, diagonalise and report the lowest states");
  add_common(solve, f);
  solve->add_flag("--no-estimate", f.no_estimate, "skip the N+1 solve behind delta_E_hat");

  auto* scan = app.add_subcommand("scan-l", "E_n versus L on a uniform grid");
  add_common(scan, f);
  scan->add_option("--L-min", f.L_min, "lower end of the L grid");
  scan->add_option("--L-max", f.L_max, "upper end of the L grid");
  scan->add_option("--samples", f.samples, "grid points (>= 5)");
  scan->add_option("--N-list", f.N_list, "comma-separated N values for an (N, L) sweep");

  auto* calibrate = app.add_subcommand("calibrate", "find L_hat(N) anchors");
  add_common(calibrate, f);
  calibrate->add_option("--N-list", f.N_list, "comma-separated ascending N values")->required();
  calibrate->add_option("--L-min", f.L_min, "bracket lower end");
  calibrate->add_option("--L-max", f.L_max, "bracket upper end");
  calibrate->add_option("--pick", f.pick, "flattest | lowest-branch");
  calibrate->add_flag("--fixed-precision", f.fixed_precision, "use --precision for every N");

  auto* compare = app.add_subcommand("compare", "SM energies against a reference");
  add_common(compare, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  vism::cli::RunConfig cfg;
  try {
    cfg = build_config(sub->get_name(), f, *sub);
  } catch (const vism::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return vism::cli::exit_code_for(e.code());
  }
  return vism::cli::run(cfg, std::cout, std::cerr);
}
