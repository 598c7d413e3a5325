#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "anthracnose/config.hpp"

using namespace anthracnose;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
  for (const auto& p : e.problems()) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const Config c = parse_config("");
  EXPECT_EQ(c.params, SpatialParameterSet::table2());
  EXPECT_EQ(c.params.base, ParameterSet::table1());
  EXPECT_TRUE(c.scenarios.empty());
}

TEST(Config, CommentsAndWhitespace) {
  const Config c = parse_config("# header\n\n  kappa = 0.5   # trailing\n");
  EXPECT_EQ(c.params.base.kappa, 0.5);
}

TEST(Config, DerivedConstantsFollowEpsilonAndVmax) {
  const Config c = parse_config("epsilon = 0.01\nv_max = 2\n");
  const auto& p = c.params.base;
  EXPECT_DOUBLE_EQ(p.eta_star, 1.0 / 1.01);
  EXPECT_DOUBLE_EQ(p.b2, 2.0 * std::log(1e5 * 2.0 * (1.0 - 0.01 / 1.01)) / 2.0);
  EXPECT_DOUBLE_EQ(p.b3, 2.0 * std::log(1e5 * 2.0));
  EXPECT_EQ(parse_config("epsilon = 0.01\nb2 = 3\n").params.base.b2, 3.0);
}

TEST(Config, PaperReproductionConfig) {
  const Config c = parse_config("sweep = paper_ode\n");
  EXPECT_EQ(c.scenarios.size(), 32u);
  std::set<std::pair<double, double>> gains, initial;
  for (const auto& s : c.scenarios) {
    gains.insert({s.k1, s.k2});
    initial.insert({s.theta0, s.v0});
  }
  EXPECT_EQ(gains.size(), 4u);
  EXPECT_EQ(initial, (std::set<std::pair<double, double>>{
                         {0.05, 0.05}, {0.05, 0.5}, {0.75, 0.05}, {0.75, 0.5}}));
}

TEST(Config, GainCapRejected) {
  try {
    parse_config("k1 = 1e4\n", "cap.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "gain-cap")) << e.what();
  }
  try {
    parse_config("scenario = model=ode theta0=0.5 v0=0.5 rho0=0.25 k1=1e4\n", "cap.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "cap.cfg:1:")) << e.what();
    EXPECT_TRUE(mentions(e, "gain-cap")) << e.what();
  }
}

TEST(Config, ProblemsCarryLineNumbers) {
  try {
    parse_config("kappa = 1\nbogus = 3\nsigma = x\nno equals sign\nkappa = 2\n", "f.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.problems().size(), 4u) << e.what();
    EXPECT_TRUE(mentions(e, "f.cfg:2: unknown key 'bogus'"));
    EXPECT_TRUE(mentions(e, "f.cfg:3: sigma"));
    EXPECT_TRUE(mentions(e, "f.cfg:4:"));
    EXPECT_TRUE(mentions(e, "f.cfg:5: duplicate key"));
  }
}

TEST(Config, SemanticViolations) {
  try {
    parse_config("sigma = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "w-singularity"));
  }
  EXPECT_THROW(parse_config("scenario = model=ode theta0=0.2 rho0=0.5\n"), ConfigError);
  EXPECT_THROW(parse_config("scenario = model=ode colour=red\n"), ConfigError);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError); }

TEST(Config, RoundTripExact) {
  Config c;
  c.params.base.epsilon = 1.0 / 3.0;
  c.params.base.eta_star = 0.1 + 0.2;
  c.params.base.b2 = std::nextafter(1.0, 2.0);
  c.params.base.seed = 987654321987ull;
  c.params.base.p2_mode = P2Mode::kSquared;
  c.params.base.eta_mode = EtaMode::kConstant;
  c.params.base.eta_value = 0.7;
  c.params.diffusivity = 3e-3;
  c.params.control_center = {0.1, 1.0 / 7.0};
  c.params.q_centers = {{0.2, 0.3}, {}, {0.9, 0.1}};
  c.params.uniform_coefficients = true;
  c.run.grid_dim = 1;
  c.run.grid_n = 48;
  c.run.t_end = 0.5;
  c.scenarios = scenario_matrix(MatrixKind::kPaperPde, c.run);
  c.scenarios[3].name = "custom-name";
  c.scenarios[4].scheme = Scheme::kRk4;
  c.scenarios[5].measurement = MeasurementMode::kFiniteDifference;
  c.scenarios[6].clamp = false;
  const std::string text = write_config(c);
  const Config back = parse_config(text);
  EXPECT_EQ(back, c) << text;
  EXPECT_EQ(write_config(back), text);
}

TEST(Config, RoundTripDefaults) {
  const Config c = parse_config("");
  EXPECT_EQ(parse_config(write_config(c)), c);
}

TEST(Scenario, FormatParseRoundTrip) {
  Scenario s;
  s.model = ModelKind::kPde;
  s.theta0 = 0.75;
  s.v0 = 0.5;
  s.rho0 = 0.25;
  s.k2 = 1e3;
  s.scheme = Scheme::kRk4;
  s.grid_dim = 1;
  EXPECT_EQ(parse_scenario(format_scenario(s), {}), s);
}

TEST(Scenario, IdsAreDistinctAcrossMatrices) {
  std::set<std::string> ids;
  std::size_t total = 0;
  for (auto kind : {MatrixKind::kPaperOde, MatrixKind::kPaperPde, MatrixKind::kTable1Grid}) {
    for (const auto& s : scenario_matrix(kind)) {
      ids.insert(s.id());
      ++total;
      EXPECT_EQ(s.id().find('/'), std::string::npos);
    }
  }
  // table1_grid repeats the figure pairs with v0 = 0.05 only where they coincide.
  EXPECT_GE(ids.size(), 48u);
  EXPECT_LE(ids.size(), total);
}

TEST(Matrix, PaperPdeHasSixteen) {
  const auto m = scenario_matrix(MatrixKind::kPaperPde);
  EXPECT_EQ(m.size(), 16u);
  for (const auto& s : m) {
    EXPECT_EQ(s.model, ModelKind::kPde);
    EXPECT_EQ(s.rho0, s.theta0);
  }
}

TEST(Matrix, PaperOdeRespectsRhoFilter) {
  const auto m = scenario_matrix(MatrixKind::kPaperOde);
  EXPECT_EQ(m.size(), 32u);
  for (const auto& s : m) EXPECT_LE(s.rho0, s.theta0);
}

TEST(Matrix, Table1GridKeepsVolumeZero) {
  const auto m = scenario_matrix(MatrixKind::kTable1Grid);
  bool zero = false;
  for (const auto& s : m) {
    EXPECT_LE(s.rho0, s.theta0);
    zero |= s.v0 == 0.0;
  }
  EXPECT_TRUE(zero);
}

TEST(Matrix, CustomEmpty) {
  EXPECT_TRUE(scenario_matrix(MatrixKind::kCustom).empty());
  CustomGrid g;
  g.theta0 = {0.5};
  g.v0 = {0.1, 0.2};
  g.rho0 = {0.25, 0.75};
  g.gains = {{0.0, 0.0}};
  EXPECT_EQ(scenario_matrix(MatrixKind::kCustom, {}, g).size(), 2u);
}

TEST(Matrix, ParseKind) {
  EXPECT_EQ(parse_matrix_kind("paper-ode"), MatrixKind::kPaperOde);
  EXPECT_EQ(parse_matrix_kind("paper_pde"), MatrixKind::kPaperPde);
  EXPECT_THROW(parse_matrix_kind("nope"), std::invalid_argument);
}
