#include "anthracnose/runner.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace anthracnose {

namespace {

std::string g9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += g9(v);
    first = false;
  }
  out += '\n';
}

std::string join_header(const std::vector<std::string>& h) {
  std::string out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += ',';
    out += h[i];
  }
  return out + '\n';
}

SimulationOptions options_for(const Scenario& s, const ParameterSet& p) {
  SimulationOptions opt;
  opt.t0 = 0.0;
  opt.t1 = s.t_end;
  opt.dt = p.dt;
  opt.scheme = s.scheme;
  opt.record_stride = s.record_stride;
  opt.clamp = s.clamp;
  opt.measurement = s.measurement;
  return opt;
}

TimeFunction alpha_of(const ParameterSet& p) {
  return [p](double t) { return eval_alpha(t, p); };
}
TimeFunction w_of(const ParameterSet& p) {
  return [p](double t) { return eval_w(t, p); };
}

NaturalEnvelopeResult natural_check(std::span<const double> times, std::span<const double> error,
                                    const ParameterSet& p) {
  NaturalEnvelopeResult r;
  const double e0 = error.front();
  const auto env = analytic_envelope_series(times, alpha_of(p), w_of(p), e0);
  const double scale = e0 != 0.0 ? std::abs(e0) : 1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double d = std::abs(error[i] - env[i]) / scale;
    if (d > r.max_deviation) {
      r.max_deviation = d;
      r.at_time = times[i];
    }
  }
  r.pass = r.max_deviation <= kNaturalEnvelopeTolerance;
  return r;
}

EnvelopeCheck squared_check(std::span<const double> times, std::span<const double> error,
                            const ParameterSet& p) {
  const auto decay = analytic_envelope_series(times, alpha_of(p), w_of(p), 1.0);
  const double e0sq = error.front() * error.front();
  std::vector<double> series(times.size()), bound(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    series[i] = error[i] * error[i];
    bound[i] = decay[i] * e0sq;
  }
  return envelope_check(series, bound, 1e-3);
}

bool natural_applies(const Scenario& s) {
  return s.model == ModelKind::kOde && s.k1 == 0.0 && s.k2 == 0.0 &&
         s.measurement == MeasurementMode::kExact;
}
bool squared_applies(const Scenario& s) {
  return s.model == ModelKind::kOde && s.k1 == 0.0 && s.k2 > 0.0 &&
         s.measurement == MeasurementMode::kExact;
}

void run_ode(const Scenario& s, const SpatialParameterSet& sp, RunRecord& rec) {
  ParameterSet p = sp.base;
  p.k1 = s.k1;
  p.k2 = s.k2;
  const OdeSystem sys{p};
  const auto traj = simulate(sys, ModelState{s.theta0, s.v0, s.rho0}, ObserverState{0.0, s.v0},
                             options_for(s, p));
  const ErrorSeries es = error_series(traj.samples);

  rec.steps = traj.steps;
  rec.samples = traj.samples.size();
  rec.overshoot = traj.overshoot;
  rec.box_ok = traj.box_ok();
  rec.conditions = check_conditions(traj.samples, p);

  std::string csv = join_header(csv_header(ModelKind::kOde));
  std::vector<double> error(traj.samples.size());
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const OdeSample& x = traj.samples[i];
    error[i] = x.truth.theta - x.observer.theta_hat;
    append_row(csv, {x.t, x.truth.theta, x.truth.v, x.truth.rho, x.observer.theta_hat,
                     x.observer.v_hat, es.abs_error[i], es.rel_error[i]});
  }
  rec.csv = std::move(csv);

  const OdeSample& last = traj.samples.back();
  rec.final_theta = last.truth.theta;
  rec.final_theta_hat = last.observer.theta_hat;
  rec.final_abs_err = es.abs_error.back();
  rec.final_rel_err = es.rel_error.back();

  if (natural_applies(s)) rec.natural_envelope = natural_check(traj.times, error, p);
  if (squared_applies(s)) rec.squared_envelope = squared_check(traj.times, error, p);
}

void run_pde(const Scenario& s, const SpatialParameterSet& sp, RunRecord& rec) {
  SpatialParameterSet q = sp;
  q.base.k1 = s.k1;
  q.base.k2 = s.k2;
  const PdeSystem sys(Grid(s.grid_dim, s.grid_n), q);
  const SimulationOptions opt = options_for(s, q.base);
  const ModelState init{s.theta0, s.v0, s.rho0};
  const SpatialTruth truth0 = sys.uniform_truth(init);
  const auto traj = simulate(sys, truth0, sys.uniform_observer({0.0, s.v0}), opt);
  const SpatialErrorSeries es = error_series(traj.samples);

  rec.steps = traj.steps;
  rec.samples = traj.samples.size();
  rec.overshoot = traj.overshoot;
  rec.box_ok = traj.box_ok();

  std::vector<Field> sensitivity;
  if (s.k1 > 0.0) sensitivity = theta_sensitivity(sys, truth0, opt);
  rec.conditions = check_conditions_spatial(traj.samples, sensitivity, sys.grid, sys.coeffs, q);

  std::string csv = join_header(csv_header(ModelKind::kPde));
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const SpatialSample& x = traj.samples[i];
    const Aggregates th = spatial_aggregates(x.state.truth.theta);
    const Aggregates hat = spatial_aggregates(x.state.observer.theta_hat);
    const Aggregates& ae = es.abs_error[i];
    const Aggregates& re = es.rel_error[i];
    append_row(csv, {x.t, th.min, th.mean, th.max, hat.min, hat.mean, hat.max, ae.min, ae.mean,
                     ae.max, re.min, re.mean, re.max});
  }
  rec.csv = std::move(csv);

  const SpatialSample& last = traj.samples.back();
  rec.final_theta = spatial_aggregates(last.state.truth.theta).mean;
  rec.final_theta_hat = spatial_aggregates(last.state.observer.theta_hat).mean;
  rec.final_abs_err = es.abs_error.back().mean;
  rec.final_rel_err = es.rel_error.back().mean;

  if (s.k1 == 0.0 && rec.conditions.alpha.positive()) {
    auto error_field = [](const SpatialSample& x) {
      Field e = x.state.truth.theta;
      for (std::size_t c = 0; c < e.size(); ++c) e[c] -= x.state.observer.theta_hat[c];
      return e;
    };
    const double e0 = l2_norm(error_field(traj.samples.front()), sys.grid);
    std::vector<double> series, bound;
    for (const auto& x : traj.samples) {
      const double n = l2_norm(error_field(x), sys.grid);
      series.push_back(n * n);
      bound.push_back(l2_envelope(x.t, rec.conditions.alpha.value, e0));
    }
    rec.l2_envelope = envelope_check(series, bound, 1e-3);
  }

  if (q.uniform_coefficients) {
    const auto ode = simulate(OdeSystem{q.base}, init, ObserverState{0.0, s.v0}, opt);
    double dev = 0.0;
    for (std::size_t i = 0; i < traj.samples.size() && i < ode.samples.size(); ++i) {
      const auto& a = traj.samples[i].state;
      const auto& b = ode.samples[i];
      for (std::size_t c = 0; c < sys.grid.cells(); ++c) {
        dev = std::max({dev, std::abs(a.truth.theta[c] - b.truth.theta),
                        std::abs(a.truth.v[c] - b.truth.v), std::abs(a.truth.rho[c] - b.truth.rho),
                        std::abs(a.observer.theta_hat[c] - b.observer.theta_hat),
                        std::abs(a.observer.v_hat[c] - b.observer.v_hat)});
      }
    }
    rec.reduction_deviation = dev;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::string hex64(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string plot_title(const Scenario& s) {
  std::ostringstream os;
  os << (s.model == ModelKind::kPde ? "spatial" : "within-host") << ": theta0=" << s.theta0
     << " v0=" << s.v0 << " rho0=" << s.rho0 << " k1=" << s.k1 << " k2=" << s.k2;
  return os.str();
}

Config snapshot(const Scenario& s, const SpatialParameterSet& sp) {
  Config c;
  c.params = sp;
  c.run.t_end = s.t_end;
  c.run.record_stride = s.record_stride;
  c.run.grid_dim = s.grid_dim;
  c.run.grid_n = s.grid_n;
  c.scenarios = {s};
  return c;
}

}  // namespace

bool RunRecord::passed() const {
  if (!ok || !box_ok) return false;
  if (natural_envelope && !natural_envelope->pass) return false;
  if (squared_envelope && !squared_envelope->pass) return false;
  if (l2_envelope && !l2_envelope->pass) return false;
  if (reduction_deviation && !(*reduction_deviation <= kReductionTolerance)) return false;
  return true;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> csv_header(ModelKind model) {
  if (model == ModelKind::kOde) {
    return {"t", "theta", "v", "rho", "theta_hat", "v_hat", "abs_err", "rel_err"};
  }
  std::vector<std::string> h = {"t"};
  for (const char* q : {"theta", "theta_hat", "abs_err", "rel_err"}) {
    for (const char* a : {"min", "mean", "max"}) h.push_back(std::string(q) + "_" + a);
  }
  return h;
}

RunRecord run_scenario(const Scenario& s, const SpatialParameterSet& sp) {
  RunRecord rec;
  rec.scenario = s;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (const auto problems = check_scenario(s, sp.base); !problems.empty()) {
      std::string msg;
      for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
      throw std::invalid_argument(msg);
    }
    if (s.model == ModelKind::kOde) {
      run_ode(s, sp, rec);
    } else {
      run_pde(s, sp, rec);
    }
    rec.csv_hash = fnv1a64(rec.csv);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::values(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      cells.emplace_back(line.substr(pos, comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " cells");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size()) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw std::invalid_argument("empty CSV");
  return t;
}

PlotSpec make_plot(const CsvTable& table, ModelKind model, PlotKind kind, const std::string& title) {
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "t";
  const auto t = table.values("t");
  auto add = [&](const std::string& column, const std::string& label, const std::string& dash) {
    spec.series.push_back({label, t, table.values(column), dash});
  };
  if (kind == PlotKind::kEstimate) {
    spec.y_label = "inhibition rate";
    if (model == ModelKind::kOde) {
      add("theta", "theta", "");
      add("theta_hat", "theta_hat", "6 3");
    } else {
      for (const char* q : {"theta", "theta_hat"}) {
        const std::string dash = std::string(q) == "theta" ? "" : "6 3";
        for (const char* a : {"min", "mean", "max"}) {
          add(std::string(q) + "_" + a, std::string(q) + " " + a, dash);
        }
      }
    }
  } else {
    spec.y_label = "relative absolute error";
    if (model == ModelKind::kOde) {
      add("rel_err", "rel_err", "");
    } else {
      for (const char* a : {"min", "mean", "max"}) add(std::string("rel_err_") + a, a, "");
    }
  }
  return spec;
}

void emit_plot(const RunRecord& record, PlotKind kind, const std::filesystem::path& path) {
  if (record.csv.empty()) throw std::invalid_argument("record has no samples");
  const CsvTable table = parse_csv(record.csv);
  if (table.rows.empty()) throw std::invalid_argument("record has no samples");
  write_file(path, render_svg(make_plot(table, record.scenario.model, kind,
                                        plot_title(record.scenario))));
}

std::string format_summary(const RunRecord& r) {
  std::ostringstream os;
  auto kv = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto yes = [](bool b) { return std::string(b ? "true" : "false"); };
  auto inf = [&](const std::string& k, const InfimumStat& s) {
    kv(k, s.informative() ? g9(s.value) : "n/a");
    if (s.informative()) kv(k + "_time", g9(s.at_time));
  };
  kv("id", r.scenario.id());
  kv("scenario", format_scenario(r.scenario));
  kv("status", r.ok ? "ok" : "failed");
  if (!r.ok) {
    kv("error", r.error);
    return os.str();
  }
  kv("steps", std::to_string(r.steps));
  kv("samples", std::to_string(r.samples));
  kv("final_theta", g9(r.final_theta));
  kv("final_theta_hat", g9(r.final_theta_hat));
  kv("final_abs_err", g9(r.final_abs_err));
  kv("final_rel_err", g9(r.final_rel_err));
  kv("overshoot_theta", g9(r.overshoot.theta));
  kv("overshoot_v", g9(r.overshoot.v));
  kv("overshoot_rho", g9(r.overshoot.rho));
  kv("overshoot_theta_hat", g9(r.overshoot.theta_hat));
  kv("overshoot_v_hat", g9(r.overshoot.v_hat));
  kv("overshoot_max", g9(r.overshoot.max()));
  kv("box_ok", yes(r.box_ok));
  const ConditionReport& c = r.conditions;
  inf("inf_alpha", c.alpha);
  std::string zeros;
  for (double z : c.alpha_zero_times) zeros += (zeros.empty() ? "" : ",") + g9(z);
  kv("alpha_zero_times", zeros);
  inf("coercivity_inf", c.coercivity);
  inf("stability_k1_inf", c.stability_k1);
  inf("stability_k1k2_inf", c.stability_k1k2);
  inf("dominance_margin_inf", c.dominance_margin);
  kv("singular_points", std::to_string(c.singular_points));
  kv("total_points", std::to_string(c.total_points));
  if (r.natural_envelope) {
    kv("natural_envelope_deviation", g9(r.natural_envelope->max_deviation));
    kv("natural_envelope_deviation_time", g9(r.natural_envelope->at_time));
    kv("natural_envelope_pass", yes(r.natural_envelope->pass));
  }
  if (r.squared_envelope) {
    kv("squared_envelope_worst_margin", g9(r.squared_envelope->worst_margin));
    kv("squared_envelope_pass", yes(r.squared_envelope->pass));
  }
  if (r.l2_envelope) {
    kv("l2_envelope_worst_margin", g9(r.l2_envelope->worst_margin));
    kv("l2_envelope_pass", yes(r.l2_envelope->pass));
  }
  if (r.reduction_deviation) {
    kv("reduction_deviation", g9(*r.reduction_deviation));
    kv("reduction_pass", yes(*r.reduction_deviation <= kReductionTolerance));
  }
  kv("wall_seconds", g9(r.wall_seconds));
  kv("csv_fnv1a64", hex64(r.csv_hash));
  return os.str();
}

std::map<std::string, std::string> parse_summary(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

void write_run(const RunRecord& record, const SpatialParameterSet& sp,
               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "config.txt", write_config(snapshot(record.scenario, sp)));
  write_file(dir / "summary.txt", format_summary(record));
  if (!record.ok) return;
  write_file(dir / "trajectory.csv", record.csv);
  emit_plot(record, PlotKind::kEstimate, dir / "estimate.svg");
  emit_plot(record, PlotKind::kError, dir / "error.svg");
}

BatchResult run_batch(const Config& config, const std::filesystem::path& root, unsigned jobs) {
  BatchResult result;
  const std::size_t n = config.scenarios.size();
  result.records.resize(n);
  std::set<std::string> used;
  for (const auto& s : config.scenarios) {
    std::string name = s.id();
    for (int k = 2; !used.insert(name).second; ++k) name = s.id() + "-" + std::to_string(k);
    result.directories.push_back(root / name);
  }

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      RunRecord rec = run_scenario(config.scenarios[i], config.params);
      try {
        write_run(rec, config.params, result.directories[i]);
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = std::string("output: ") + e.what();
      }
      result.records[i] = std::move(rec);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return result;
}

std::filesystem::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ANTHRACNOSE_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

namespace {

// Values pass through 9 significant digits on their way to the CSV.
constexpr double kRoundoff = 1e-8;

bool close(double a, double b, double scale) {
  return std::abs(a - b) <= kRoundoff * scale + 1e-15;
}

}  // namespace

std::vector<std::string> check_run_dir(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  auto fail = [&](const std::string& msg) { problems.push_back(msg); };

  Config config;
  std::map<std::string, std::string> summary;
  std::string csv_text;
  try {
    config = load_config(dir / "config.txt");
    summary = parse_summary(read_file(dir / "summary.txt"));
    if (summary["status"] != "ok") {
      fail("run failed: " + summary["error"]);
      return problems;
    }
    csv_text = read_file(dir / "trajectory.csv");
  } catch (const std::exception& e) {
    fail(e.what());
    return problems;
  }
  if (config.scenarios.size() != 1) {
    fail("config.txt must hold exactly one scenario");
    return problems;
  }
  const Scenario& s = config.scenarios.front();
  ParameterSet p = config.params.base;
  p.k1 = s.k1;
  p.k2 = s.k2;

  if (summary["csv_fnv1a64"] != hex64(fnv1a64(csv_text))) fail("CSV hash does not match summary");
  if (summary["scenario"] != format_scenario(s)) fail("summary scenario differs from config");

  CsvTable table;
  try {
    table = parse_csv(csv_text);
  } catch (const std::exception& e) {
    fail(std::string("CSV: ") + e.what());
    return problems;
  }
  if (table.header != csv_header(s.model)) {
    fail("CSV header does not match the schema");
    return problems;
  }
  const std::size_t steps = step_count(0.0, s.t_end, p.dt);
  const std::size_t stride = static_cast<std::size_t>(s.record_stride);
  const std::size_t expected_rows = steps / stride + 1;
  if (table.rows.size() != expected_rows) {
    fail("CSV has " + std::to_string(table.rows.size()) + " rows, expected " +
         std::to_string(expected_rows));
  }
  if (summary["samples"] != std::to_string(table.rows.size())) fail("summary sample count differs");
  if (table.rows.empty()) return problems;

  const auto t = table.values("t");
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double want = static_cast<double>(i * stride) * p.dt;
    if (!close(t[i], want, std::max(1.0, want))) {
      fail("time grid broken at row " + std::to_string(i + 1));
      break;
    }
  }

  const double tol = kOvershootTolerance;
  auto box = [&](const std::string& col, double hi) {
    for (double x : table.values(col)) {
      if (x < -tol || x > hi + tol) {
        fail(col + " leaves [0, " + g9(hi) + "]: " + g9(x));
        return;
      }
    }
  };

  if (s.model == ModelKind::kOde) {
    box("theta", 1.0);
    box("rho", 1.0);
    box("theta_hat", 1.0);
    box("v", p.v_max);
    box("v_hat", p.v_max);
    const auto th = table.values("theta");
    const auto hat = table.values("theta_hat");
    const auto ae = table.values("abs_err");
    const auto re = table.values("rel_err");
    std::vector<double> error(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) {
      error[i] = th[i] - hat[i];
      if (!close(ae[i], std::abs(error[i]), std::abs(th[i]) + std::abs(hat[i]))) {
        fail("abs_err inconsistent at row " + std::to_string(i + 1));
        break;
      }
      const double denom = std::max(std::abs(th[i]), kRelativeErrorFloor);
      if (!close(re[i] * denom, ae[i], 2.0 * ae[i] + std::abs(th[i]) + std::abs(hat[i]))) {
        fail("rel_err inconsistent at row " + std::to_string(i + 1));
        break;
      }
    }
    auto verdict = [&](const std::string& key, bool recomputed) {
      if (!summary.count(key)) {
        fail(key + " missing from summary");
      } else if ((summary[key] == "true") != recomputed) {
        fail(key + " in summary disagrees with the CSV");
      }
      if (!recomputed) fail(key + " fails on the stored trajectory");
    };
    if (natural_applies(s)) {
      verdict("natural_envelope_pass", natural_check(t, error, p).pass);
    } else if (summary.count("natural_envelope_pass")) {
      fail("natural_envelope_pass recorded for a scenario it does not apply to");
    }
    if (squared_applies(s)) {
      verdict("squared_envelope_pass", squared_check(t, error, p).pass);
    } else if (summary.count("squared_envelope_pass")) {
      fail("squared_envelope_pass recorded for a scenario it does not apply to");
    }
  } else {
    for (const char* q : {"theta", "theta_hat", "abs_err", "rel_err"}) {
      const auto lo = table.values(std::string(q) + "_min");
      const auto mid = table.values(std::string(q) + "_mean");
      const auto hi = table.values(std::string(q) + "_max");
      for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= mid[i] && mid[i] <= hi[i])) {
          fail(std::string(q) + " min/mean/max out of order at row " + std::to_string(i + 1));
          break;
        }
      }
    }
    box("theta_min", 1.0);
    box("theta_max", 1.0);
    box("theta_hat_min", 1.0);
    box("theta_hat_max", 1.0);
    const auto th = table.values("theta_mean");
    const auto hat = table.values("theta_hat_mean");
    const auto ae = table.values("abs_err_mean");
    const auto ae_min = table.values("abs_err_min");
    for (std::size_t i = 0; i < th.size(); ++i) {
      // mean |e| >= |mean e|
      if (ae_min[i] < 0.0 || ae[i] + kRoundoff * (th[i] + hat[i] + ae[i]) + 1e-15 <
                                 std::abs(th[i] - hat[i])) {
        fail("abs_err aggregates inconsistent at row " + std::to_string(i + 1));
        break;
      }
    }
    for (const char* key : {"l2_envelope_pass", "reduction_pass"}) {
      if (summary.count(key) && summary[key] != "true") fail(std::string(key) + " is false");
    }
  }
  if (summary["box_ok"] != "true") fail("overshoot above tolerance: " + summary["overshoot_max"]);
  return problems;
}

void replot_run_dir(const std::filesystem::path& dir) {
  const Config config = load_config(dir / "config.txt");
  if (config.scenarios.size() != 1) throw std::runtime_error("config.txt must hold one scenario");
  const Scenario& s = config.scenarios.front();
  const CsvTable table = parse_csv(read_file(dir / "trajectory.csv"));
  if (table.rows.empty()) throw std::runtime_error("trajectory.csv has no samples");
  write_file(dir / "estimate.svg",
             render_svg(make_plot(table, s.model, PlotKind::kEstimate, plot_title(s))));
  write_file(dir / "error.svg",
             render_svg(make_plot(table, s.model, PlotKind::kError, plot_title(s))));
}

}  // namespace anthracnose
