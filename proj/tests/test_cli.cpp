#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "vism/cli.hpp"

using namespace vism;
using namespace vism::cli;

namespace {
const PrecisionContext kCtx(30);
HPReal dec(const std::string& s) { return parse_decimal(s, kCtx); }

RunConfig base(const char* command) {
  RunConfig c;
  c.command = command;
  c.timing = false;
  return c;
}

int run_capture(const RunConfig& cfg, std::string& out, std::string& err) {
  std::ostringstream o, e;
  const int code = run(cfg, o, e);
  out = o.str();
  err = e.str();
  return code;
}

std::string temp_path(const char* name) { return ::testing::TempDir() + name; }
}  // namespace

TEST(Config, JsonMirrorsRunConfig) {
  const auto j = nlohmann::json::parse(R"({"command":"compare","potential":"quartic","mode":"confinement","N":12,
      "L":"4.5","precision":40,"states":3,"format":"json","reference":"perturbation1","N_list":[1,2,3],
      "L_min":"1","L_max":"2","samples":9,"timing":false,"method":"energy-error-min","pick":"lowest-branch"})");
  const auto c = config_from_json(j);
  EXPECT_EQ(c.command, "compare");
  EXPECT_EQ(c.potential, "quartic");
  EXPECT_EQ(c.mode, BoundaryMode::Confinement);
  EXPECT_EQ(c.N, 12);
  EXPECT_EQ(c.L, "4.5");
  EXPECT_EQ(c.precision, 40u);
  EXPECT_EQ(c.states, 3);
  EXPECT_EQ(c.format, OutputFormat::Json);
  EXPECT_EQ(c.reference, ReferenceKind::Perturbation1);
  EXPECT_EQ(c.N_list, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(c.method, LHatMethod::EnergyErrorMin);
  EXPECT_EQ(c.pick, InflectionPick::LowestBranch);
  EXPECT_FALSE(c.timing);
  EXPECT_EQ(config_from_json(nlohmann::json::parse(R"({"L": 3.25})")).L, "3.25");
}

TEST(Config, Rejections) {
  const auto code = [](const char* text) {
    try {
      config_from_json(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return exit_code_for(e.code());
    }
    return 0;
  };
  EXPECT_EQ(code(R"({"colour":"red"})"), 2);
  EXPECT_EQ(code(R"({"N":"ten"})"), 2);
  EXPECT_EQ(code(R"({"format":"xml"})"), 2);
  EXPECT_EQ(code(R"([1,2])"), 2);
  EXPECT_EQ(code(R"({"mode":"box"})"), 2);
}

TEST(Config, FileLoading) {
  const std::string path = temp_path("vism_cfg.json");
  {
    std::ofstream os(path);
    os << R"({"potential":"x^2","N":4,"L":"3"})";
  }
  const auto c = load_config_file(path);
  EXPECT_EQ(c.N, 4);
  std::remove(path.c_str());
  try {
    load_config_file(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigError);
  }
}

TEST(Validate, ExitCodeTwoForBadConfig) {
  std::string out, err;
  auto c = base("solve");
  c.potential = "x^2 + 0.3*x^3";  // no built-in calibration, L auto
  EXPECT_EQ(run_capture(c, out, err), 2);
  EXPECT_NE(err.find("auto"), std::string::npos);
  c = base("solve");
  c.N = 0;
  EXPECT_EQ(run_capture(c, out, err), 2);
  c = base("solve");
  c.L = "-1";
  EXPECT_EQ(run_capture(c, out, err), 2);
  c = base("solve");
  c.L = "abc";
  EXPECT_EQ(run_capture(c, out, err), 2);
  c = base("scan-l");
  c.L_min = "1";
  c.L_max = "2";
  c.samples = 1;
  EXPECT_EQ(run_capture(c, out, err), 2);
  c = base("calibrate");
  EXPECT_EQ(run_capture(c, out, err), 2);  // empty N list
  c.N_list = {3, 2};
  EXPECT_EQ(run_capture(c, out, err), 2);
  c = base("compare");
  EXPECT_EQ(run_capture(c, out, err), 2);  // no reference
  c.reference = ReferenceKind::Exact;
  c.potential = "quartic";
  c.L = "5";
  EXPECT_EQ(run_capture(c, out, err), 2);  // ReferenceUnavailable
  c = base("solve");
  c.states = 30;
  c.N = 3;
  EXPECT_EQ(run_capture(c, out, err), 2);
  c = base("bogus");
  EXPECT_EQ(run_capture(c, out, err), 2);
}

TEST(Validate, ExitCodeThreeForNumericalFailure) {
  EXPECT_EQ(exit_code_for(Errc::NoConvergence), 3);
  EXPECT_EQ(exit_code_for(Errc::BracketInvalid), 3);
  EXPECT_EQ(exit_code_for(Errc::NotSymmetric), 3);
  std::string out, err;
  auto c = base("calibrate");
  c.N_list = {1, 2};
  c.L_min = "0.5";
  c.L_max = "0.8";
  EXPECT_EQ(run_capture(c, out, err), 3);
  EXPECT_NE(out.find("# failed N=1"), std::string::npos);
}

TEST(Solve, FreeParticleBox) {
  auto c = base("solve");
  c.potential = "0";
  c.mode = BoundaryMode::Confinement;
  c.L = "1";
  c.N = 3;
  c.states = 5;
  const auto r = cmd_solve(c);
  ASSERT_EQ(r.rows.size(), 5u);
  PrecisionScope scope(kCtx);
  const HPReal pi = hp_pi(kCtx);
  for (int m = 1; m <= 5; ++m)
    EXPECT_TRUE(vism::testing::close_rel(dec(r.rows[static_cast<std::size_t>(m - 1)].energy), (m * pi / 2) * (m * pi / 2),
                                         pow10_neg(28, kCtx)));
}

TEST(Solve, ShoAutoWithReference) {
  auto c = base("solve");
  c.potential = "sho";
  c.N = 10;
  c.states = 3;
  c.reference = ReferenceKind::Exact;
  c.M = 101;
  const auto r = cmd_solve(c);
  EXPECT_EQ(r.potential, "x^2");
  EXPECT_EQ(dec(r.L), dec("5.8510870448718314851"));
  ASSERT_EQ(r.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(r.rows[i].delta_E && r.rows[i].delta_E_hat && r.rows[i].delta_psi);
    if (i) EXPECT_GT(dec(r.rows[i].energy), dec(r.rows[i - 1].energy));
  }
  EXPECT_LT(dec(*r.rows[0].delta_E), dec("1e-15"));
  EXPECT_EQ(r.rows[0].parity, "even");
  EXPECT_EQ(r.rows[1].parity, "odd");
  EXPECT_FALSE(r.wall_time_s);
}

TEST(Solve, AnchorFileDrivesAutoL) {
  const std::string path = temp_path("vism_anchors.csv");
  {
    std::ofstream os(path);
    os << "N,L_hat\n2,3\n3,3.5\n4,4\n";
  }
  auto c = base("solve");
  c.potential = "x^2 + 0.3*x^3";
  c.N = 3;
  c.anchors = path;
  c.estimate = false;
  EXPECT_EQ(dec(cmd_solve(c).L), dec("3.5"));
  std::remove(path.c_str());
}

TEST(Output, CsvAndJsonShapes) {
  auto c = base("solve");
  c.potential = "x^2";
  c.L = "4";
  c.N = 4;
  c.states = 2;
  std::string out, err;
  ASSERT_EQ(run_capture(c, out, err), 0) << err;
  EXPECT_NE(out.find("n,energy,parity,delta_E_hat\n"), std::string::npos);
  EXPECT_EQ(out.find("wall_time_s"), std::string::npos);
  c.format = OutputFormat::Json;
  ASSERT_EQ(run_capture(c, out, err), 0) << err;
  const auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j["N"], 4);
  ASSERT_EQ(j["states"].size(), 2u);
  EXPECT_TRUE(j["states"][0]["energy"].is_string());
  c.timing = true;
  ASSERT_EQ(run_capture(c, out, err), 0) << err;
  EXPECT_TRUE(nlohmann::json::parse(out).contains("wall_time_s"));
}

TEST(Output, WritesToFile) {
  const std::string path = temp_path("vism_out.csv");
  auto c = base("solve");
  c.L = "4";
  c.N = 2;
  c.out = path;
  std::string out, err;
  ASSERT_EQ(run_capture(c, out, err), 0) << err;
  EXPECT_TRUE(out.empty());
  std::ifstream is(path);
  std::string first;
  std::getline(is, first);
  EXPECT_EQ(first, "# command: solve");
  std::remove(path.c_str());
}

TEST(Determinism, IdenticalConfigIdenticalBytes) {
  for (const char* cmd : {"solve", "scan-l", "compare"}) {
    auto c = base(cmd);
    c.potential = "x^2 + 0.1*x^4";
    c.N = 6;
    c.L = "4.2";
    c.states = 3;
    c.L_min = "3";
    c.L_max = "5";
    c.samples = 7;
    c.reference = ReferenceKind::Perturbation1;
    for (auto f : {OutputFormat::Csv, OutputFormat::Json}) {
      c.format = f;
      std::string a, b, err;
      ASSERT_EQ(run_capture(c, a, err), 0) << err;
      ASSERT_EQ(run_capture(c, b, err), 0) << err;
      EXPECT_EQ(a, b) << cmd;
    }
  }
}

TEST(ScanL, FlagsInflectionAndMinimum) {
  auto c = base("scan-l");
  c.potential = "x^2";
  c.N = 5;
  c.L_min = "2";
  c.L_max = "8";
  c.samples = 25;
  c.format = OutputFormat::Json;
  std::string out, err;
  ASSERT_EQ(run_capture(c, out, err), 0) << err;
  auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j["scans"][0]["inflections"].size(), 1u);
  EXPECT_EQ(j["scans"][0]["minima"].size(), 0u);
  EXPECT_EQ(j["scans"][0]["rows"].size(), 25u);

  c.mode = BoundaryMode::Confinement;
  ASSERT_EQ(run_capture(c, out, err), 0) << err;
  j = nlohmann::json::parse(out);
  EXPECT_EQ(j["scans"][0]["minima"].size(), 1u);
}

TEST(ScanL, TwoDimensionalSweep) {
  auto c = base("scan-l");
  c.potential = "x^2";
  c.N_list = {2, 3};
  c.L_min = "2";
  c.L_max = "4";
  c.samples = 5;
  c.reference = ReferenceKind::Exact;
  std::string out, err;
  ASSERT_EQ(run_capture(c, out, err), 0) << err;
  EXPECT_NE(out.find("N,L,E_0,delta_E_0\n"), std::string::npos);
  EXPECT_NE(out.find("\n3,4.00000000000e+00,"), std::string::npos);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n') - std::count(out.begin(), out.end(), '#'), 11);
}

TEST(Calibrate, ShoAnchorsAndFit) {
  auto c = base("calibrate");
  c.potential = "sho";
  c.N_list = {1, 2, 3};
  std::string out, err;
  ASSERT_EQ(run_capture(c, out, err), 0) << err;
  std::istringstream is(out);
  const auto anchors = read_anchor_csv(is, kCtx);
  ASSERT_EQ(anchors.size(), 3u);
  EXPECT_TRUE(vism::testing::close_abs(anchors[0].L_hat, dec("2.52479"), dec("5e-6")));
  EXPECT_TRUE(vism::testing::close_abs(anchors[1].L_hat, dec("3.04635"), dec("5e-6")));
  EXPECT_NE(out.find("# power_law"), std::string::npos);
}

TEST(Compare, QuarticPerturbationColumns) {
  auto c = base("compare");
  c.potential = "quartic";
  c.N = 20;
  c.L = "6";
  c.reference = ReferenceKind::Perturbation0;
  const auto r0 = cmd_compare(c);
  c.reference = ReferenceKind::Perturbation1;
  const auto r1 = cmd_compare(c);
  EXPECT_TRUE(vism::testing::close_abs(dec(*r0.rows[0].relative_difference), dec("0.061"), dec("0.0005")));
  EXPECT_TRUE(vism::testing::close_abs(dec(*r1.rows[0].relative_difference), dec("0.009"), dec("0.0005")));
  EXPECT_EQ(dec(*r1.rows[0].reference_energy), dec("1.075"));
  EXPECT_FALSE(r1.rows[0].delta_E_hat);
}

TEST(Named, LookupByNameOrExpression) {
  EXPECT_EQ(find_named_potential("sho")->name, "sho");
  EXPECT_EQ(find_named_potential("1*x^2")->name, "sho");
  EXPECT_EQ(find_named_potential("0.1*x^4 + x^2")->name, "quartic");
  EXPECT_EQ(find_named_potential("x^2 + 10*cos(10*pi*x)")->name, "rapid");
  EXPECT_FALSE(find_named_potential("x^2 + x^3"));
  EXPECT_FALSE(find_named_potential("((("));
  for (const auto& p : kNamedPotentials) {
    const auto f = builtin_interpolant(p.name, kCtx);
    ASSERT_TRUE(f) << p.name;
    for (std::size_t i = 0; i + 1 < f->anchors().size(); ++i) EXPECT_LT(f->anchors()[i].N, f->anchors()[i + 1].N);
  }
}
