#include "anthracnose/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace anthracnose {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  s = trim(s);
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return x;
}

long long parse_integer(std::string_view s) {
  s = trim(s);
  long long x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return x;
}

std::uint64_t parse_unsigned(std::string_view s) {
  s = trim(s);
  std::uint64_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a nonnegative integer: '" + std::string(s) + "'");
  }
  return x;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "on" || s == "1") return true;
  if (s == "false" || s == "off" || s == "0") return false;
  throw std::invalid_argument("not a boolean: '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  s = trim(s);
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_double(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += num(v[i]);
  }
  return out;
}

int parse_int_in(std::string_view s, long long lo, long long hi, const char* what) {
  const long long x = parse_integer(s);
  if (x < lo || x > hi) throw std::invalid_argument(std::string(what) + " out of range");
  return static_cast<int>(x);
}

std::string model_name(ModelKind m) { return m == ModelKind::kPde ? "pde" : "ode"; }
std::string scheme_name(Scheme s) { return s == Scheme::kRk4 ? "rk4" : "euler"; }
std::string measurement_name(MeasurementMode m) {
  return m == MeasurementMode::kFiniteDifference ? "finite_difference" : "exact";
}

// Compact decimal for directory names: 0.05 -> "0.05", 1000 -> "1000".
std::string short_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

std::string Scenario::id() const {
  if (!name.empty()) return name;
  std::string s = model_name(model) + "_th" + short_num(theta0) + "_v" + short_num(v0) + "_rho" +
                  short_num(rho0) + "_k" + short_num(k1) + "-" + short_num(k2);
  if (measurement != MeasurementMode::kExact) s += "_fd";
  if (scheme != Scheme::kEuler) s += "_" + scheme_name(scheme);
  if (model == ModelKind::kPde) s += "_" + std::to_string(grid_dim) + "d" + std::to_string(grid_n);
  return s;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

std::string format_scenario(const Scenario& s) {
  std::string out;
  if (!s.name.empty()) out += "name=" + s.name + " ";
  out += "model=" + model_name(s.model);
  out += " theta0=" + num(s.theta0) + " v0=" + num(s.v0) + " rho0=" + num(s.rho0);
  out += " k1=" + num(s.k1) + " k2=" + num(s.k2);
  out += " measurement=" + measurement_name(s.measurement);
  out += " scheme=" + scheme_name(s.scheme);
  out += " grid_dim=" + std::to_string(s.grid_dim) + " grid_n=" + std::to_string(s.grid_n);
  out += " t_end=" + num(s.t_end) + " record_stride=" + std::to_string(s.record_stride);
  out += std::string(" clamp=") + (s.clamp ? "on" : "off");
  return out;
}

Scenario parse_scenario(std::string_view spec, const RunSettings& defaults) {
  Scenario s;
  s.t_end = defaults.t_end;
  s.record_stride = defaults.record_stride;
  s.grid_dim = defaults.grid_dim;
  s.grid_n = defaults.grid_n;
  std::istringstream is{std::string(spec)};
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string_view val = std::string_view(tok).substr(eq + 1);
    if (key == "name") {
      s.name = std::string(val);
    } else if (key == "model") {
      if (val == "ode") s.model = ModelKind::kOde;
      else if (val == "pde") s.model = ModelKind::kPde;
      else throw std::invalid_argument("model must be ode or pde");
    } else if (key == "theta0") {
      s.theta0 = parse_double(val);
    } else if (key == "v0") {
      s.v0 = parse_double(val);
    } else if (key == "rho0") {
      s.rho0 = parse_double(val);
    } else if (key == "k1") {
      s.k1 = parse_double(val);
    } else if (key == "k2") {
      s.k2 = parse_double(val);
    } else if (key == "measurement") {
      if (val == "exact") s.measurement = MeasurementMode::kExact;
      else if (val == "finite_difference") s.measurement = MeasurementMode::kFiniteDifference;
      else throw std::invalid_argument("measurement must be exact or finite_difference");
    } else if (key == "scheme") {
      if (val == "euler") s.scheme = Scheme::kEuler;
      else if (val == "rk4") s.scheme = Scheme::kRk4;
      else throw std::invalid_argument("scheme must be euler or rk4");
    } else if (key == "grid_dim") {
      s.grid_dim = parse_int_in(val, 1, 2, "grid_dim");
    } else if (key == "grid_n") {
      s.grid_n = parse_int_in(val, 2, 4096, "grid_n");
    } else if (key == "t_end") {
      s.t_end = parse_double(val);
    } else if (key == "record_stride") {
      s.record_stride = parse_int_in(val, 1, 1000000000, "record_stride");
    } else if (key == "clamp") {
      s.clamp = parse_bool(val);
    } else {
      throw std::invalid_argument("unknown scenario key '" + key + "'");
    }
  }
  return s;
}

std::vector<std::string> check_scenario(const Scenario& s, const ParameterSet& p) {
  std::vector<std::string> out;
  auto in = [](double x, double lo, double hi) { return x >= lo && x <= hi; };
  if (!in(s.theta0, 0.0, 1.0)) out.push_back("theta0 must lie in [0,1]");
  if (!in(s.v0, 0.0, p.v_max)) out.push_back("v0 must lie in [0,v_max]");
  if (!in(s.rho0, 0.0, 1.0)) out.push_back("rho0 must lie in [0,1]");
  if (s.rho0 > s.theta0) out.push_back("rho0 must not exceed theta0");
  if (!(s.k1 >= 0.0 && s.k2 >= 0.0)) out.push_back("[H15] gains must be nonnegative");
  if (!(s.t_end >= 0.0)) out.push_back("t_end must be nonnegative");
  if (p.dt > 0.0 && std::max(s.k1, s.k2) > 1.0 / (10.0 * p.dt)) {
    std::ostringstream os;
    os << "[gain-cap] gain " << std::max(s.k1, s.k2) << " exceeds 1/(10 dt) = " << 1.0 / (10.0 * p.dt);
    out.push_back(os.str());
  }
  return out;
}

std::vector<std::pair<double, double>> reference_gain_pairs() {
  return {{0.0, 0.0}, {0.0, 1e3}, {1e3, 0.0}, {1e3, 1e3}};
}

namespace {

std::vector<Scenario> cross(ModelKind model, const std::vector<std::pair<double, double>>& ivs,
                            const std::function<std::vector<double>(double)>& rhos,
                            const std::vector<std::pair<double, double>>& gains,
                            const RunSettings& settings) {
  std::vector<Scenario> out;
  for (const auto& [th, v] : ivs) {
    for (double rho : rhos(th)) {
      for (const auto& [k1, k2] : gains) {
        Scenario s;
        s.model = model;
        s.theta0 = th;
        s.v0 = v;
        s.rho0 = rho;
        s.k1 = k1;
        s.k2 = k2;
        s.t_end = settings.t_end;
        s.record_stride = settings.record_stride;
        s.grid_dim = settings.grid_dim;
        s.grid_n = settings.grid_n;
        out.push_back(s);
      }
    }
  }
  return out;
}

std::vector<double> admissible_rho(double theta0, const std::vector<double>& grid) {
  std::vector<double> out;
  for (double r : grid) {
    if (r <= theta0) out.push_back(r);
  }
  if (out.empty()) out.push_back(theta0);
  return out;
}

const std::vector<std::pair<double, double>> kFigurePairs = {
    {0.05, 0.05}, {0.05, 0.5}, {0.75, 0.05}, {0.75, 0.5}};

}  // namespace

std::vector<Scenario> scenario_matrix(MatrixKind kind, const RunSettings& settings,
                                      const CustomGrid& custom) {
  const std::vector<double> rho_grid = {0.25, 0.5, 0.75};
  switch (kind) {
    case MatrixKind::kPaperOde:
      return cross(ModelKind::kOde, kFigurePairs,
                   [&](double th) { return admissible_rho(th, rho_grid); }, reference_gain_pairs(),
                   settings);
    case MatrixKind::kPaperPde:
      return cross(ModelKind::kPde, kFigurePairs, [](double th) { return std::vector{th}; },
                   reference_gain_pairs(), settings);
    case MatrixKind::kTable1Grid: {
      std::vector<std::pair<double, double>> ivs;
      for (double th : {0.05, 0.25, 0.5, 0.75}) {
        for (double v : {0.0, 0.25, 0.5, 0.75}) ivs.emplace_back(th, v);
      }
      return cross(ModelKind::kOde, ivs,
                   [&](double th) { return admissible_rho(th, rho_grid); }, reference_gain_pairs(),
                   settings);
    }
    case MatrixKind::kCustom: {
      std::vector<std::pair<double, double>> ivs;
      for (double th : custom.theta0) {
        for (double v : custom.v0) ivs.emplace_back(th, v);
      }
      return cross(custom.model, ivs,
                   [&](double th) {
                     std::vector<double> out;
                     for (double r : custom.rho0) {
                       if (r <= th) out.push_back(r);
                     }
                     return out;
                   },
                   custom.gains, settings);
    }
  }
  return {};
}

MatrixKind parse_matrix_kind(std::string_view name) {
  if (name == "paper_ode" || name == "paper-ode") return MatrixKind::kPaperOde;
  if (name == "paper_pde" || name == "paper-pde") return MatrixKind::kPaperPde;
  if (name == "table1_grid" || name == "table1-grid") return MatrixKind::kTable1Grid;
  if (name == "custom") return MatrixKind::kCustom;
  throw std::invalid_argument("unknown scenario matrix '" + std::string(name) + "'");
}

namespace {

struct Line {
  int number;
  std::string key;
  std::string value;
};

using Setter = std::function<void(Config&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> m;
    auto dbl = [&m](const char* key, double ParameterSet::*field) {
      m[key] = [field](Config& c, std::string_view v) { c.params.base.*field = parse_double(v); };
    };
    dbl("b1", &ParameterSet::b1);
    dbl("b2", &ParameterSet::b2);
    dbl("b3", &ParameterSet::b3);
    dbl("c1", &ParameterSet::c1);
    dbl("c2", &ParameterSet::c2);
    dbl("c3", &ParameterSet::c3);
    dbl("d1", &ParameterSet::d1);
    dbl("d2", &ParameterSet::d2);
    dbl("d3", &ParameterSet::d3);
    dbl("omega1", &ParameterSet::omega1);
    dbl("omega2", &ParameterSet::omega2);
    dbl("phase1", &ParameterSet::phase1);
    dbl("phase2", &ParameterSet::phase2);
    dbl("sigma", &ParameterSet::sigma);
    dbl("epsilon", &ParameterSet::epsilon);
    dbl("eta_star", &ParameterSet::eta_star);
    dbl("eta_value", &ParameterSet::eta_value);
    dbl("v_max", &ParameterSet::v_max);
    dbl("kappa", &ParameterSet::kappa);
    dbl("k1", &ParameterSet::k1);
    dbl("k2", &ParameterSet::k2);
    dbl("p1", &ParameterSet::p1);
    dbl("dt", &ParameterSet::dt);
    m["eta_mode"] = [](Config& c, std::string_view v) {
      if (v == "inverse_one_plus_epsilon") c.params.base.eta_mode = EtaMode::kInverseOnePlusEpsilon;
      else if (v == "constant") c.params.base.eta_mode = EtaMode::kConstant;
      else throw std::invalid_argument("eta_mode must be inverse_one_plus_epsilon or constant");
    };
    m["p2_mode"] = [](Config& c, std::string_view v) {
      if (v == "linear") c.params.base.p2_mode = P2Mode::kLinear;
      else if (v == "squared") c.params.base.p2_mode = P2Mode::kSquared;
      else throw std::invalid_argument("p2_mode must be linear or squared");
    };
    m["seed"] = [](Config& c, std::string_view v) { c.params.base.seed = parse_unsigned(v); };
    m["diffusivity"] = [](Config& c, std::string_view v) { c.params.diffusivity = parse_double(v); };
    m["anisotropy_scale"] = [](Config& c, std::string_view v) {
      c.params.anisotropy_scale = parse_double(v);
    };
    m["control_center"] = [](Config& c, std::string_view v) { c.params.control_center = parse_list(v); };
    for (int i = 1; i <= 3; ++i) {
      m["q" + std::to_string(i) + "_center"] = [i](Config& c, std::string_view v) {
        auto& centers = c.params.q_centers;
        if (centers.size() < static_cast<std::size_t>(i)) centers.resize(static_cast<std::size_t>(i));
        centers[static_cast<std::size_t>(i - 1)] = parse_list(v);
      };
    }
    m["uniform_coefficients"] = [](Config& c, std::string_view v) {
      c.params.uniform_coefficients = parse_bool(v);
    };
    m["t_end"] = [](Config& c, std::string_view v) { c.run.t_end = parse_double(v); };
    m["record_stride"] = [](Config& c, std::string_view v) {
      c.run.record_stride = parse_int_in(v, 1, 1000000000, "record_stride");
    };
    m["grid_dim"] = [](Config& c, std::string_view v) { c.run.grid_dim = parse_int_in(v, 1, 2, "grid_dim"); };
    m["grid_n"] = [](Config& c, std::string_view v) { c.run.grid_n = parse_int_in(v, 2, 4096, "grid_n"); };
    return m;
  }();
  return table;
}

}  // namespace

Config parse_config(std::string_view text, const std::string& source) {
  std::vector<std::string> problems;
  auto problem = [&](int line, const std::string& msg) {
    problems.push_back(source + ":" + std::to_string(line) + ": " + msg);
  };

  std::vector<Line> lines;
  int number = 0;
  while (!text.empty()) {
    ++number;
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      problem(number, "expected 'key = value'");
      continue;
    }
    lines.push_back({number, std::string(trim(raw.substr(0, eq))), std::string(trim(raw.substr(eq + 1)))});
  }

  Config config;
  config.params = SpatialParameterSet::table2();
  bool set_b2 = false, set_b3 = false, set_eta_star = false;
  std::map<std::string, int, std::less<>> seen;
  for (const Line& l : lines) {
    if (l.key == "scenario" || l.key == "sweep") continue;
    if (auto [it, fresh] = seen.emplace(l.key, l.number); !fresh) {
      problem(l.number, "duplicate key '" + l.key + "' (first set on line " +
                            std::to_string(it->second) + ")");
      continue;
    }
    const auto setter = setters().find(l.key);
    if (setter == setters().end()) {
      problem(l.number, "unknown key '" + l.key + "'");
      continue;
    }
    try {
      setter->second(config, l.value);
    } catch (const std::exception& e) {
      problem(l.number, l.key + ": " + e.what());
      continue;
    }
    set_b2 |= l.key == "b2";
    set_b3 |= l.key == "b3";
    set_eta_star |= l.key == "eta_star";
  }

  ParameterSet& p = config.params.base;
  if (!set_eta_star) p.eta_star = 1.0 / (1.0 + p.epsilon);
  if (!set_b2) p.b2 = default_b2(p.v_max, p.epsilon, p.eta_star);
  if (!set_b3) p.b3 = default_b3(p.v_max);

  for (const Line& l : lines) {
    try {
      if (l.key == "sweep") {
        for (auto& s : scenario_matrix(parse_matrix_kind(l.value), config.run)) {
          config.scenarios.push_back(std::move(s));
        }
      } else if (l.key == "scenario") {
        Scenario s = parse_scenario(l.value, config.run);
        for (const auto& msg : check_scenario(s, p)) problem(l.number, "scenario: " + msg);
        config.scenarios.push_back(std::move(s));
      }
    } catch (const std::exception& e) {
      problem(l.number, l.key + ": " + e.what());
    }
  }

  const ValidationReport report = validate(config.params);
  for (const auto& v : report.violations) {
    if (v.severity != Severity::kError) continue;
    problems.push_back(source + ": [" + v.hypothesis + "] " + v.message);
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path.string() + ": cannot open file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string write_config(const Config& c) {
  const ParameterSet& p = c.params.base;
  std::ostringstream os;
  auto kv = [&os](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
  kv("b1", num(p.b1));
  kv("b2", num(p.b2));
  kv("b3", num(p.b3));
  kv("c1", num(p.c1));
  kv("c2", num(p.c2));
  kv("c3", num(p.c3));
  kv("d1", num(p.d1));
  kv("d2", num(p.d2));
  kv("d3", num(p.d3));
  kv("omega1", num(p.omega1));
  kv("omega2", num(p.omega2));
  kv("phase1", num(p.phase1));
  kv("phase2", num(p.phase2));
  kv("sigma", num(p.sigma));
  kv("epsilon", num(p.epsilon));
  kv("eta_star", num(p.eta_star));
  kv("eta_mode", p.eta_mode == EtaMode::kConstant ? "constant" : "inverse_one_plus_epsilon");
  kv("eta_value", num(p.eta_value));
  kv("v_max", num(p.v_max));
  kv("kappa", num(p.kappa));
  kv("k1", num(p.k1));
  kv("k2", num(p.k2));
  kv("p1", num(p.p1));
  kv("p2_mode", p.p2_mode == P2Mode::kSquared ? "squared" : "linear");
  kv("dt", num(p.dt));
  kv("seed", std::to_string(p.seed));
  kv("diffusivity", num(c.params.diffusivity));
  kv("anisotropy_scale", num(c.params.anisotropy_scale));
  kv("control_center", list(c.params.control_center));
  for (std::size_t i = 0; i < c.params.q_centers.size(); ++i) {
    const std::string key = "q" + std::to_string(i + 1) + "_center";
    kv(key.c_str(), list(c.params.q_centers[i]));
  }
  kv("uniform_coefficients", c.params.uniform_coefficients ? "true" : "false");
  kv("t_end", num(c.run.t_end));
  kv("record_stride", std::to_string(c.run.record_stride));
  kv("grid_dim", std::to_string(c.run.grid_dim));
  kv("grid_n", std::to_string(c.run.grid_n));
  for (const auto& s : c.scenarios) kv("scenario", format_scenario(s));
  return os.str();
}

}  // namespace anthracnose
