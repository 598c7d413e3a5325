#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "anthracnose/runner.hpp"

using namespace anthracnose;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("anthracnose-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ANTHRACNOSE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

Scenario ode(double theta0, double v0, double rho0, double k1, double k2) {
  Scenario s;
  s.theta0 = theta0;
  s.v0 = v0;
  s.rho0 = rho0;
  s.k1 = k1;
  s.k2 = k2;
  return s;
}

Scenario small_pde(double k1, double k2) {
  Scenario s = ode(0.75, 0.5, 0.75, k1, k2);
  s.model = ModelKind::kPde;
  s.grid_dim = 1;
  s.grid_n = 4;
  s.t_end = 0.3;
  return s;
}

}  // namespace

TEST(RunScenario, NaturalObserverEnvelopePasses) {
  const RunRecord r = run_scenario(ode(0.75, 0.5, 0.5, 0, 0), SpatialParameterSet::table2());
  ASSERT_TRUE(r.ok) << r.error;
  ASSERT_TRUE(r.natural_envelope.has_value());
  EXPECT_TRUE(r.natural_envelope->pass);
  EXPECT_LE(r.natural_envelope->max_deviation, 1e-3);
  EXPECT_FALSE(r.squared_envelope.has_value());
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.samples, 1001u);
}

TEST(RunScenario, SquaredEnvelopeForK2) {
  const RunRecord r = run_scenario(ode(0.05, 0.05, 0.05, 0, 1e3), SpatialParameterSet::table2());
  ASSERT_TRUE(r.ok) << r.error;
  ASSERT_TRUE(r.squared_envelope.has_value());
  EXPECT_TRUE(r.squared_envelope->pass);
}

TEST(RunScenario, ZeroDuration) {
  Scenario s = ode(0.5, 0.5, 0.25, 0, 0);
  s.t_end = 0.0;
  const RunRecord r = run_scenario(s, SpatialParameterSet::table2());
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.csv, "t,theta,v,rho,theta_hat,v_hat,abs_err,rel_err\n0,0.5,0.5,0.25,0,0.5,0.5,1\n");
}

TEST(RunScenario, PdeReductionRecorded) {
  auto sp = SpatialParameterSet::table2();
  sp.uniform_coefficients = true;
  const RunRecord r = run_scenario(small_pde(0, 1e3), sp);
  ASSERT_TRUE(r.ok) << r.error;
  ASSERT_TRUE(r.reduction_deviation.has_value());
  EXPECT_LE(*r.reduction_deviation, 1e-6);
  EXPECT_FALSE(run_scenario(small_pde(0, 1e3), SpatialParameterSet::table2())
                   .reduction_deviation.has_value());
}

TEST(RunScenario, PdeL2EnvelopeWhenAlphaPositive) {
  auto sp = SpatialParameterSet::table2();
  sp.base.p1 = 0.5;
  const RunRecord r = run_scenario(small_pde(0, 0), sp);
  ASSERT_TRUE(r.ok) << r.error;
  ASSERT_TRUE(r.l2_envelope.has_value());
  EXPECT_TRUE(r.l2_envelope->pass);
  EXPECT_FALSE(run_scenario(small_pde(0, 0), SpatialParameterSet::table2()).l2_envelope.has_value());
}

TEST(RunScenario, FailureIsRecorded) {
  const RunRecord r = run_scenario(ode(0.2, 0.5, 0.5, 0, 0), SpatialParameterSet::table2());
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.error.find("rho0"), std::string::npos);
  EXPECT_FALSE(r.passed());
}

TEST(Csv, ParseAndColumns) {
  const CsvTable t = parse_csv("a,b\n1,2\n3,4.5\n");
  EXPECT_EQ(t.values("b"), (std::vector<double>{2, 4.5}));
  EXPECT_THROW(t.column("c"), std::out_of_range);
  EXPECT_THROW(parse_csv("a,b\n1\n"), std::invalid_argument);
  EXPECT_THROW(parse_csv("a,b\n1,x\n"), std::invalid_argument);
}

TEST(Csv, HeaderSchema) {
  const auto h = csv_header(ModelKind::kPde);
  ASSERT_EQ(h.size(), 13u);
  EXPECT_EQ(h[1], "theta_min");
  EXPECT_EQ(h[12], "rel_err_max");
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Plot, SeriesCounts) {
  TempDir dir;
  const RunRecord o = run_scenario(ode(0.05, 0.05, 0.05, 0, 0), SpatialParameterSet::table2());
  emit_plot(o, PlotKind::kEstimate, dir.path() / "e.svg");
  emit_plot(o, PlotKind::kError, dir.path() / "r.svg");
  EXPECT_EQ(count(slurp(dir.path() / "e.svg"), "<polyline"), 2u);
  EXPECT_EQ(count(slurp(dir.path() / "r.svg"), "<polyline"), 1u);

  const RunRecord p = run_scenario(small_pde(0, 0), SpatialParameterSet::table2());
  emit_plot(p, PlotKind::kError, dir.path() / "pe.svg");
  emit_plot(p, PlotKind::kEstimate, dir.path() / "pt.svg");
  EXPECT_EQ(count(slurp(dir.path() / "pe.svg"), "<polyline"), 3u);
  EXPECT_EQ(count(slurp(dir.path() / "pt.svg"), "<polyline"), 6u);
  const std::string svg = slurp(dir.path() / "pt.svg");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<svg"), count(svg, "</svg>"));

  EXPECT_THROW(emit_plot(o, PlotKind::kError, "/nonexistent-dir/x.svg"), std::runtime_error);
}

TEST(Plot, EscapesText) {
  PlotSpec spec;
  spec.title = "a < b & \"c\"";
  spec.series.push_back({"x<y", {0, 1}, {0, 1}, ""});
  const std::string svg = render_svg(spec);
  EXPECT_NE(svg.find("a &lt; b &amp; &quot;c&quot;"), std::string::npos);
  EXPECT_EQ(svg.find("x<y"), std::string::npos);
}

TEST(Summary, RoundTripKeys) {
  const RunRecord r = run_scenario(ode(0.75, 0.05, 0.25, 0, 1e3), SpatialParameterSet::table2());
  const auto kv = parse_summary(format_summary(r));
  EXPECT_EQ(kv.at("status"), "ok");
  EXPECT_EQ(kv.at("squared_envelope_pass"), "true");
  EXPECT_EQ(kv.at("box_ok"), "true");
  EXPECT_EQ(kv.at("samples"), "1001");
  EXPECT_EQ(kv.count("natural_envelope_pass"), 0u);
}

TEST(RunDir, CheckPassesThenCatchesTampering) {
  TempDir dir;
  Config c;
  c.scenarios = {ode(0.75, 0.5, 0.25, 0, 0), ode(0.05, 0.5, 0.05, 0, 1e3), small_pde(1e3, 1e3)};
  const BatchResult b = run_batch(c, dir.path(), 2);
  ASSERT_EQ(b.records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(b.records[i].passed()) << b.records[i].error;
    const auto problems = check_run_dir(b.directories[i]);
    EXPECT_TRUE(problems.empty()) << problems.front();
  }

  const fs::path csv = b.directories[0] / "trajectory.csv";
  std::string text = slurp(csv);
  const auto row = text.find("\n0.5,");
  ASSERT_NE(row, std::string::npos);
  text[row + 6] = text[row + 6] == '9' ? '1' : '9';
  spit(csv, text);
  EXPECT_FALSE(check_run_dir(b.directories[0]).empty());
  EXPECT_NE(cli("check " + b.directories[0].string()), 0);
  EXPECT_EQ(cli("check " + b.directories[1].string()), 0);

  fs::remove(b.directories[1] / "trajectory.csv");
  EXPECT_FALSE(check_run_dir(b.directories[1]).empty());

  replot_run_dir(b.directories[2]);
  EXPECT_EQ(cli("plot " + b.directories[2].string()), 0);
}

TEST(RunDir, HashAloneCatchesSilentEdit) {
  TempDir dir;
  Config c;
  c.scenarios = {ode(0.75, 0.5, 0.25, 1e3, 0)};
  const BatchResult b = run_batch(c, dir.path(), 1);
  const fs::path csv = b.directories[0] / "trajectory.csv";
  spit(csv, slurp(csv) + "\n");
  const auto problems = check_run_dir(b.directories[0]);
  ASSERT_FALSE(problems.empty());
  EXPECT_NE(problems.front().find("hash"), std::string::npos);
}

TEST(Batch, DeterministicAndIsolated) {
  TempDir a, b;
  Config c;
  c.scenarios = scenario_matrix(MatrixKind::kPaperOde);
  c.scenarios.push_back(ode(0.2, 0.5, 0.5, 0, 0));  // invalid, must not stop the batch
  const BatchResult ra = run_batch(c, a.path(), 3);
  const BatchResult rb = run_batch(c, b.path(), 1);
  ASSERT_EQ(ra.records.size(), 33u);
  EXPECT_FALSE(ra.records.back().ok);
  for (std::size_t i = 0; i + 1 < ra.records.size(); ++i) {
    ASSERT_TRUE(ra.records[i].ok);
    EXPECT_EQ(slurp(ra.directories[i] / "trajectory.csv"),
              slurp(rb.directories[i] / "trajectory.csv"));
  }
  EXPECT_TRUE(fs::exists(ra.directories.back() / "summary.txt"));
}

TEST(Batch, DuplicateIdsGetDistinctDirectories) {
  TempDir dir;
  Config c;
  Scenario s = ode(0.5, 0.5, 0.25, 0, 0);
  s.t_end = 0.01;
  c.scenarios = {s, s};
  const BatchResult b = run_batch(c, dir.path(), 2);
  EXPECT_NE(b.directories[0], b.directories[1]);
}

TEST(OutputRoot, FlagThenEnvironment) {
  EXPECT_EQ(output_root("x"), fs::path("x"));
  ::setenv("ANTHRACNOSE_OUTPUT_ROOT", "/tmp/elsewhere", 1);
  EXPECT_EQ(output_root(""), fs::path("/tmp/elsewhere"));
  ::unsetenv("ANTHRACNOSE_OUTPUT_ROOT");
  EXPECT_EQ(output_root(""), fs::path("runs"));
}

TEST(Cli, ValidateAndErrors) {
  TempDir dir;
  spit(dir.path() / "empty.cfg", "");
  spit(dir.path() / "bad.cfg", "k1 = 1e4\n");
  EXPECT_EQ(cli("validate " + (dir.path() / "empty.cfg").string()), 0);
  EXPECT_NE(cli("validate " + (dir.path() / "bad.cfg").string()), 0);
  EXPECT_NE(cli("validate " + (dir.path() / "missing.cfg").string()), 0);
  EXPECT_NE(cli("validate --frobnicate " + (dir.path() / "empty.cfg").string()), 0);
  EXPECT_NE(cli("sweep paper-nothing"), 0);
  EXPECT_NE(cli("check " + (dir.path() / "nothing-here").string()), 0);
}

TEST(Cli, SweepPaperOde) {
  TempDir dir;
  ASSERT_EQ(cli("sweep paper-ode -o " + dir.path().string()), 0);
  std::size_t runs = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) {
    if (fs::exists(e.path() / "trajectory.csv") && fs::exists(e.path() / "estimate.svg")) ++runs;
  }
  EXPECT_GE(runs, 16u);
  EXPECT_EQ(cli("check " + dir.path().string()), 0);
}

TEST(Cli, RunUsesEnvironmentRoot) {
  TempDir dir;
  spit(dir.path() / "one.cfg", "t_end = 0.1\nscenario = model=ode theta0=0.5 v0=0.5 rho0=0.5\n");
  const std::string env = "ANTHRACNOSE_OUTPUT_ROOT=" + (dir.path() / "out").string() + " ";
  const std::string cmd =
      env + ANTHRACNOSE_CLI + " run " + (dir.path() / "one.cfg").string() + " >/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "ode_th0.5_v0.5_rho0.5_k0-0" / "summary.txt"));
}
