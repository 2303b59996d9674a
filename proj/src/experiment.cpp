#include "maxslope/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "maxslope/analysis.hpp"
#include "maxslope/errors.hpp"

namespace maxslope {

namespace {

using Clock = std::chrono::system_clock;

std::string iso_time(Clock::time_point t) {
  const std::time_t c = Clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&c, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? Json("nan") : Json(x > 0 ? "inf" : "-inf");
}

std::string exponent_label(double p) {
  std::ostringstream out;
  out << std::setprecision(6) << p;
  return out.str();
}

void require_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!ok.count(key)) throw Error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error("bad type for '" + std::string(key) + "' in " + where);
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : path) {
    if (c == '.') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  for (const auto& part : parts) {
    if (part.empty()) throw Error("empty segment in key path '" + path + "'");
  }
  return parts;
}

void set_path(Json& root, const std::string& path, const Json& value) {
  Json* node = &root;
  for (const auto& part : split_path(path)) {
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw Error("'" + part + "' is not an array index in '" + path + "'");
      }
      if (idx >= node->size()) throw Error("index " + part + " out of range in '" + path + "'");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = Json::object();
      if (!node->is_object()) throw Error("cannot descend into '" + part + "' in '" + path + "'");
      node = &(*node)[part];
    }
  }
  *node = value;
}

void parse_check(const Json& checks, const char* key, CheckSetting& setting) {
  if (!checks.contains(key)) return;
  const auto& c = checks.at(key);
  if (c.is_boolean()) {
    setting.enabled = c.get<bool>();
    return;
  }
  const std::string where = std::string("checks.") + key;
  require_keys(c, where, {"enabled", "tolerance"});
  setting.enabled = get_or(c, "enabled", setting.enabled, where);
  setting.tolerance = get_or(c, "tolerance", setting.tolerance, where);
  if (!(setting.tolerance > 0.0)) throw Error(where + ".tolerance must be > 0");
}

template <class F>
void for_each_check(ExperimentChecks& c, F&& fn) {
  fn("energy_identity", c.energy_identity);
  fn("lipschitz", c.lipschitz);
  fn("reparametrized_identity", c.reparametrized_identity);
  fn("convexity", c.convexity);
  fn("regularizing", c.regularizing);
  fn("slope_monotone", c.slope_monotone);
  fn("global_slope", c.global_slope);
  fn("duality", c.duality);
  fn("transformed_energy", c.transformed_energy);
}

Json check_to_json(const CheckOutcome& c) {
  Json j = report_to_json(c.report);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

CheckOutcome skipped(const std::string& name, double tolerance, std::string note) {
  return CheckOutcome{DiagnosticsReport::skipped_check(name, tolerance), true, std::move(note)};
}

// A checker that could not be evaluated at all, e.g. because the curve is too
// coarse for a derived construction, fails with the reason attached.
CheckOutcome unevaluable(const std::string& name, double tolerance, const std::exception& e) {
  DiagnosticsReport r;
  r.name = name;
  r.tolerance = tolerance;
  r.max_residual = std::numeric_limits<double>::infinity();
  r.mean_residual = r.max_residual;
  r.passed = false;
  return CheckOutcome{std::move(r), true, std::string("could not be evaluated: ") + e.what()};
}

bool counts_as_failure(const CheckOutcome& c) { return c.enabled && !c.report.skipped && !c.report.passed; }

SampledCurve build_flow(const ExperimentConfig& cfg, const Functional& f, const Point& u0) {
  switch (cfg.flow.method) {
    case FlowMethod::kSolver: return solve_minimizing_movements(f, cfg.p, u0, cfg.solver);
    case FlowMethod::kOracle: {
      if (cfg.flow.nodes < 2) throw Error("flow.nodes must be at least 2");
      if (!(cfg.flow.horizon > 0.0)) throw Error("flow.horizon must be positive");
      return oracle_flow(f, cfg.p, u0, linspace(cfg.flow.horizon, cfg.flow.nodes), OracleOptions{cfg.flow.theta});
    }
    case FlowMethod::kFile: {
      auto curve = curve_from_json(read_json_file(cfg.flow.path));
      if (curve.p != cfg.p) throw Error("loaded curve has p = " + exponent_label(curve.p) + ", config says " +
                                        exponent_label(cfg.p));
      if (space_name(curve.space) != space_name(f.space())) throw SpaceMismatch("loaded curve lives on another space");
      attach_values(curve, f);
      return curve;
    }
  }
  throw Error("unknown flow method");
}

std::vector<CheckOutcome> flow_checks(const ExperimentConfig& cfg, const Functional& f, const SampledCurve& u) {
  const auto& c = cfg.checks;
  const auto& profile = f.profile();
  std::vector<CheckOutcome> out;

  if (c.energy_identity.enabled) {
    out.push_back({check_energy_identity(u, f, cfg.p, c.energy_identity.tolerance), true, {}});
  }

  const bool wants_arc = c.lipschitz.enabled || c.reparametrized_identity.enabled || c.convexity.enabled;
  if (wants_arc) {
    const auto arc = arc_length_reparametrize(u, f);
    const bool degenerate = arc.curve.size() < 3;
    const std::string note = "arc-length curve is degenerate (the flow does not move)";
    if (c.lipschitz.enabled) {
      out.push_back(degenerate ? skipped("lipschitz", c.lipschitz.tolerance, note)
                               : CheckOutcome{check_lipschitz(arc.curve, c.lipschitz.tolerance), true, {}});
    }
    if (c.reparametrized_identity.enabled) {
      out.push_back(degenerate
                        ? skipped("reparametrized_identity", c.reparametrized_identity.tolerance, note)
                        : CheckOutcome{check_reparametrized_identity(arc.curve, f, c.reparametrized_identity.tolerance),
                                       true,
                                       {}});
    }
    if (c.convexity.enabled) {
      out.push_back(degenerate ? skipped("convexity_along_curve", c.convexity.tolerance, note)
                               : CheckOutcome{check_convexity_along_curve(arc.curve, f, profile, c.convexity.tolerance),
                                              true,
                                              {}});
    }
  }

  if (c.regularizing.enabled) {
    for (auto& item : regularizing_bound_items(u, f, cfg.p, profile, c.regularizing.tolerance)) {
      std::string note = item.skipped ? "not applicable to this functional or profile" : "";
      out.push_back({std::move(item), true, std::move(note)});
    }
  }

  if (c.slope_monotone.enabled) {
    if (profile.lambda < 0.0) {
      out.push_back(skipped("slope_monotone", c.slope_monotone.tolerance, "only guaranteed for lambda >= 0"));
    } else {
      out.push_back({check_slope_monotone(u, f, profile, c.slope_monotone.tolerance), true, {}});
    }
  }

  if (c.global_slope.enabled) {
    // Sampled global slope formula against the analytic slope at up to 16 nodes.
    std::vector<double> residuals;
    const std::size_t stride = std::max<std::size_t>(1, u.size() / 16);
    CandidateOptions opts;
    opts.seed = cfg.seed;
    for (std::size_t i = 0; i < u.size(); i += stride) {
      const auto candidates = default_candidates(f, u.points[i], opts);
      residuals.push_back(
          std::abs(slope_global_formula(f, u.points[i], candidates) - slope_analytic(f, u.points[i])));
    }
    out.push_back({DiagnosticsReport::from_residuals("global_slope", residuals, c.global_slope.tolerance), true, {}});
  }
  return out;
}

void write_run_info(const std::filesystem::path& dir, Clock::time_point started, const std::string& what) {
  const auto finished = Clock::now();
  write_json_file(dir / "run_info.json",
                  Json{{"run", what},
                       {"started", iso_time(started)},
                       {"finished", iso_time(finished)},
                       {"wall_seconds", std::chrono::duration<double>(finished - started).count()}});
}

}  // namespace

void ExperimentConfig::scale_tolerances(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw Error("tolerance scale must be a positive finite number");
  for_each_check(checks, [&](const char*, CheckSetting& s) { s.tolerance *= factor; });
  transform.energy_tolerance = checks.transformed_energy.tolerance;
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  set_path(config, key, value);
}

ExperimentConfig parse_experiment(const Json& j) {
  require_keys(j, "experiment config",
               {"name", "functional", "p", "p_prime", "initial_point", "flow", "solver", "transform", "checks",
                "output_dir", "seed"});
  ExperimentConfig cfg;
  const std::string where = "experiment config";
  cfg.name = get_or(j, "name", cfg.name, where);
  if (!j.contains("functional")) throw Error("experiment config needs a 'functional' entry");
  cfg.functional_spec = j.at("functional");
  cfg.p = get_or(j, "p", cfg.p, where);
  if (!(cfg.p > 1.0)) throw Error("p must be > 1");
  if (j.contains("p_prime")) {
    const auto& pp = j.at("p_prime");
    if (pp.is_number()) {
      cfg.p_primes = {pp.get<double>()};
    } else if (pp.is_array()) {
      for (const auto& x : pp) {
        if (!x.is_number()) throw Error("p_prime entries must be numbers");
        cfg.p_primes.push_back(x.get<double>());
      }
    } else {
      throw Error("p_prime must be a number or a list of numbers");
    }
    for (double x : cfg.p_primes) {
      if (!(x > 1.0)) throw Error("every p_prime must be > 1");
    }
  }
  if (!j.contains("initial_point")) throw Error("experiment config needs an 'initial_point' entry");
  cfg.initial_point = j.at("initial_point");

  if (j.contains("flow")) {
    const auto& fl = j.at("flow");
    require_keys(fl, "flow", {"method", "horizon", "nodes", "theta", "path"});
    const auto method = get_or(fl, "method", std::string("solver"), "flow");
    if (method == "solver") {
      cfg.flow.method = FlowMethod::kSolver;
    } else if (method == "oracle") {
      cfg.flow.method = FlowMethod::kOracle;
    } else if (method == "file") {
      cfg.flow.method = FlowMethod::kFile;
    } else {
      throw Error("flow.method must be solver, oracle or file");
    }
    cfg.flow.horizon = get_or(fl, "horizon", cfg.flow.horizon, "flow");
    cfg.flow.nodes = get_or(fl, "nodes", cfg.flow.nodes, "flow");
    cfg.flow.theta = get_or(fl, "theta", cfg.flow.theta, "flow");
    cfg.flow.path = get_or(fl, "path", cfg.flow.path, "flow");
    if (cfg.flow.method == FlowMethod::kFile && cfg.flow.path.empty()) throw Error("flow.path is required for file");
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    require_keys(s, "solver", {"tau", "horizon", "max_steps", "stop_on_critical", "blow_up_radius"});
    cfg.solver.tau = get_or(s, "tau", cfg.solver.tau, "solver");
    cfg.solver.horizon = get_or(s, "horizon", cfg.solver.horizon, "solver");
    cfg.solver.max_steps = get_or(s, "max_steps", cfg.solver.max_steps, "solver");
    cfg.solver.stop_on_critical = get_or(s, "stop_on_critical", cfg.solver.stop_on_critical, "solver");
    cfg.solver.blow_up_radius = get_or(s, "blow_up_radius", cfg.solver.blow_up_radius, "solver");
    cfg.solver.validate();
  }
  if (j.contains("transform")) {
    const auto& t = j.at("transform");
    require_keys(t, "transform", {"samples", "extension_nodes", "limit_tolerance", "tail_margin"});
    cfg.transform.samples = get_or(t, "samples", cfg.transform.samples, "transform");
    cfg.transform.extension_nodes = get_or(t, "extension_nodes", cfg.transform.extension_nodes, "transform");
    cfg.transform.limit_tolerance = get_or(t, "limit_tolerance", cfg.transform.limit_tolerance, "transform");
    cfg.transform.tail.margin = get_or(t, "tail_margin", cfg.transform.tail.margin, "transform");
    if (!(cfg.transform.limit_tolerance > 0.0)) throw Error("transform.limit_tolerance must be > 0");
    if (!(cfg.transform.tail.margin > 0.0)) throw Error("transform.tail_margin must be > 0");
  }
  if (j.contains("checks")) {
    const auto& c = j.at("checks");
    require_keys(c, "checks",
                 {"energy_identity", "lipschitz", "reparametrized_identity", "convexity", "regularizing",
                  "slope_monotone", "global_slope", "duality", "transformed_energy"});
    for_each_check(cfg.checks, [&](const char* key, CheckSetting& s) { parse_check(c, key, s); });
  }
  cfg.transform.energy_tolerance = cfg.checks.transformed_energy.tolerance;
  cfg.output_dir = get_or(j, "output_dir", std::string("out"), where);
  cfg.seed = get_or(j, "seed", cfg.seed, where);

  // Fail early on registration misses and malformed points.
  const Functional f = functional_from_json(cfg.functional_spec);
  require_valid(f.space(), point_from_json(cfg.initial_point));
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, ExperimentStage stage) {
  const auto started = Clock::now();
  const Functional f = functional_from_json(cfg.functional_spec);
  const Point u0 = point_from_json(cfg.initial_point);
  std::filesystem::create_directories(cfg.output_dir);

  ExperimentResult result;
  result.name = cfg.name;
  result.flow = build_flow(cfg, f, u0);
  const SampledCurve& u = result.flow;
  export_curve(u, f, CurveFormat::kCsv, cfg.output_dir / "curve.csv");
  export_curve(u, f, CurveFormat::kJson, cfg.output_dir / "curve.json");

  const bool verify = stage == ExperimentStage::kVerify;
  if (verify) result.checks = flow_checks(cfg, f, u);

  if (stage != ExperimentStage::kSolve) {
    for (double pp : cfg.p_primes) {
      TransformOutcome t;
      t.p_prime = pp;
      try {
        t.result = transform_curve(u, f, cfg.p, pp, f.profile(), cfg.transform);
      } catch (const HypothesisError& e) {
        t.refusal = e.what();
        result.transforms.push_back(std::move(t));
        continue;
      }
      const TransformResult& r = *t.result;
      const std::string label = exponent_label(pp);
      export_curve(r.transformed, f, CurveFormat::kCsv, cfg.output_dir / ("curve_p" + label + ".csv"));
      if (verify) {
        const std::string blocked_note = "transform blocked: no admissible extension beyond S*";
        if (cfg.checks.transformed_energy.enabled) {
          if (r.diagnostics.empty()) {
            t.checks.push_back(skipped("transformed_energy_identity", cfg.checks.transformed_energy.tolerance,
                                       "transformed curve has fewer than 3 nodes"));
          } else {
            auto rep = r.diagnostics.front();
            rep.name = "transformed_energy_identity";
            t.checks.push_back({std::move(rep), true, r.blocked() ? blocked_note : ""});
          }
        }
        if (cfg.checks.duality.enabled) {
          if (r.blocked()) {
            t.checks.push_back(skipped("duality", cfg.checks.duality.tolerance, blocked_note));
          } else {
            try {
              t.checks.push_back(
                  {verify_duality(u, r, f, f.profile(), cfg.checks.duality.tolerance, cfg.transform), true, {}});
            } catch (const Error& e) {
              t.checks.push_back(unevaluable("duality", cfg.checks.duality.tolerance, e));
            }
          }
        }
      }
      result.transforms.push_back(std::move(t));
    }
  }

  // Exit status and the deterministic report.
  bool failed = false;
  Json checks = Json::array();
  for (const auto& c : result.checks) {
    failed = failed || counts_as_failure(c);
    checks.push_back(check_to_json(c));
  }
  Json transforms = Json::array();
  for (const auto& t : result.transforms) {
    Json tj;
    if (!t.refusal.empty()) {
      failed = true;
      tj = Json{{"p", cfg.p}, {"p_prime", t.p_prime}, {"status", "refused"}, {"refusal", t.refusal}};
    } else {
      tj = transform_to_json(*t.result);
      tj["expected_blocked"] = t.result->blocked();
      tj["curve_csv"] = "curve_p" + exponent_label(t.p_prime) + ".csv";
      Json tc = Json::array();
      for (const auto& c : t.checks) {
        if (!t.result->blocked()) failed = failed || counts_as_failure(c);
        tc.push_back(check_to_json(c));
      }
      tj["checks"] = tc;
      write_json_file(cfg.output_dir / ("transform_p" + exponent_label(t.p_prime) + ".json"), tj);
    }
    transforms.push_back(tj);
  }
  result.exit_code = failed ? 1 : 0;

  const auto horizon = detect_positivity_horizon(u, f);
  Json horizon_json{{"t_star", horizon.t_star ? number(*horizon.t_star) : Json("inf")},
                    {"stationary_tail", horizon.stationary_tail},
                    {"stopped", horizon.stopped()}};
  Json flow_json{{"method", cfg.flow.method == FlowMethod::kSolver   ? "solver"
                            : cfg.flow.method == FlowMethod::kOracle ? "oracle"
                                                                     : "file"},
                 {"nodes", u.size()},
                 {"end_time", u.end_time()},
                 {"blow_up", u.meta.blow_up},
                 {"critical_stop", u.meta.critical_stop}};
  if (u.meta.tau) flow_json["tau"] = *u.meta.tau;
  result.report = Json{{"name", cfg.name},
                       {"stage", stage == ExperimentStage::kSolve       ? "solve"
                                 : stage == ExperimentStage::kTransform ? "transform"
                                                                        : "verify"},
                       {"p", cfg.p},
                       {"functional", functional_to_json(f)},
                       {"initial_point", point_to_json(u0)},
                       {"seed", cfg.seed},
                       {"flow", flow_json},
                       {"horizon", horizon_json},
                       {"checks", checks},
                       {"transforms", transforms},
                       {"status", failed ? "fail" : "pass"},
                       {"exit_code", result.exit_code}};
  write_json_file(cfg.output_dir / "reports.json", result.report);
  write_run_info(cfg.output_dir, started, cfg.name);
  return result;
}

// ---------------------------------------------------------------------------
// Curated examples

namespace {

struct Comparison {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool lower_bound = false;  // pass when measured > threshold instead of <=
  bool passed() const { return lower_bound ? measured > threshold : measured <= threshold; }
};

Json comparison_json(const Comparison& c) {
  return Json{{"name", c.name},
              {"measured", number(c.measured)},
              {c.lower_bound ? "must_exceed" : "tolerance", number(c.threshold)},
              {"passed", c.passed()}};
}

double first_coord(const Point& p) { return std::get<EuclideanPoint>(p).coords[0]; }

Json euclid(std::vector<double> x) { return Json{{"space", "euclidean"}, {"coords", std::move(x)}}; }

ExperimentConfig curated(Json j, const std::filesystem::path& dir, double tol_scale) {
  j["output_dir"] = dir.string();
  auto cfg = parse_experiment(j);
  cfg.scale_tolerances(tol_scale);
  return cfg;
}

std::vector<Comparison> blowup_example(const std::filesystem::path& out, double s, int& exit_code) {
  const Json config{{"name", "blowup_example"},
                    {"functional", {{"functional", "negative_quadratic"}, {"space", "euclidean"}, {"dim", 1}}},
                    {"p", 2.0},
                    {"p_prime", {1.5}},
                    {"initial_point", euclid({1.0})},
                    {"flow", {{"method", "oracle"}, {"horizon", 10.0}, {"nodes", 10000}}}};
  write_json_file(out / "config.json", config);
  const auto run = run_experiment(curated(config, out / "experiment", s));
  exit_code = run.exit_code;
  const auto& t = run.transforms.front();
  const auto& r = *t.result;
  const double a = alpha(2.0, 1.5);
  double sup = 0.0;
  for (std::size_t i = 0; i < r.transformed.size() && r.transformed.times[i] <= 0.9; ++i) {
    const double sv = r.transformed.times[i];
    sup = std::max(sup, std::abs(first_coord(r.transformed.points[i]) - std::pow(1.0 + a * sv, 1.0 / a)));
  }
  double flow_sup = 0.0;
  for (std::size_t i = 0; i < run.flow.size(); ++i) {
    flow_sup = std::max(flow_sup, std::abs(first_coord(run.flow.points[i]) - std::exp(run.flow.times[i])) /
                                      std::exp(run.flow.times[i]));
  }
  const double s_star = r.time_map.total_S.infinite ? INFINITY : r.time_map.total_S.value;
  return {{"relative error of u(t) = e^t", flow_sup, 1e-12 * s},
          {"sup error of u_p'(s) vs (1 + alpha s)^(1/alpha) on [0, 0.9]", sup, 1e-3 * s},
          {"|S* + 1/alpha|", std::abs(s_star + 1.0 / a), 1e-3 * s},
          {"transform reported blocked (1 = yes)", r.blocked() ? 0.0 : 1.0, 0.0}};
}

std::vector<Comparison> nonuniqueness_example(const std::filesystem::path& out, double s, int& exit_code) {
  const Json config{{"name", "nonuniqueness_example"},
                    {"functional", {{"functional", "negative_quadratic"}, {"space", "euclidean"}, {"dim", 2}}},
                    {"p", 2.0},
                    {"initial_point", euclid({0.0, 0.0})},
                    {"flow", {{"method", "solver"}}},
                    {"solver", {{"tau", 1e-2}, {"horizon", 1.0}}}};
  write_json_file(out / "config.json", config);
  const auto run = run_experiment(curated(config, out / "experiment", s));
  exit_code = run.exit_code;
  const Functional f = functional_from_json(config.at("functional"));
  const Point zero = euclidean_point({0.0, 0.0});

  double drift = 0.0;
  for (const auto& v : run.flow.points) drift = std::max(drift, distance(f.space(), zero, v));
  std::vector<Comparison> out_list = {{"p = 2 flow drift from the origin", drift, 0.0},
                                      {"slope at the origin", slope_analytic(f, zero), 0.0}};

  const std::vector<double> thetas = {0.0, std::numbers::pi / 3.0, std::numbers::pi / 2.0, std::numbers::pi};
  const auto grid = linspace(2.0, 4001);
  std::vector<SampledCurve> flows;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    flows.push_back(oracle_flow(f, 4.0, zero, grid, OracleOptions{thetas[k]}));
    export_curve(flows.back(), f, CurveFormat::kCsv, out / ("theta_" + std::to_string(k) + ".csv"));
    const double res = check_energy_identity(flows.back(), f, 4.0).max_residual;
    std::ostringstream name;
    name << "p' = 4 energy identity, theta = " << std::setprecision(6) << thetas[k];
    out_list.push_back({name.str(), res, 1e-2 * s});
  }
  double closest = INFINITY;
  for (std::size_t a = 0; a < flows.size(); ++a) {
    for (std::size_t b = a + 1; b < flows.size(); ++b) {
      double sup = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        sup = std::max(sup, distance(f.space(), flows[a].points[i], flows[b].points[i]));
      }
      closest = std::min(closest, sup);
    }
  }
  out_list.push_back({"smallest pairwise sup-distance between theta flows", closest, 0.1, true});
  return out_list;
}

std::vector<Comparison> normlike_stationary(const std::filesystem::path& out, double s, int& exit_code) {
  const double tau = 1e-3;
  const Json config{{"name", "normlike_stationary"},
                    {"functional", {{"functional", "norm_like"}, {"space", "euclidean"}, {"dim", 1}}},
                    {"p", 2.0},
                    {"p_prime", {4.0}},
                    {"initial_point", euclid({1.0})},
                    {"flow", {{"method", "solver"}}},
                    {"solver", {{"tau", tau}, {"horizon", 2.0}}}};
  write_json_file(out / "config.json", config);
  const auto run = run_experiment(curated(config, out / "experiment", s));
  exit_code = run.exit_code;
  const Functional f = functional_from_json(config.at("functional"));
  const auto& u = run.flow;
  const auto h = detect_positivity_horizon(u, f);
  double movement = INFINITY;
  if (h.t_star) {
    movement = 0.0;
    for (std::size_t i = h.index; i < u.size(); ++i) {
      movement = std::max(movement, distance(u.space, u.points[i], u.points[h.index]));
    }
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sup = std::max(sup, std::abs(first_coord(u.points[i]) - std::max(1.0 - u.times[i], 0.0)));
  }
  const auto& r = *run.transforms.front().result;
  const double s_star = r.time_map.total_S.infinite ? INFINITY : r.time_map.total_S.value;
  return {{"|t* - u0|", h.t_star ? std::abs(*h.t_star - 1.0) : INFINITY, 2.0 * tau * s},
          {"movement after t*", movement, 1e-10 * s},
          {"sup |u(t) - max(1 - t, 0)|", sup, 1e-9 * s},
          {"|S*_{2->4} - 1| (unit speed)", std::abs(s_star - 1.0), 1e-9 * s}};
}

std::vector<Comparison> quadratic_family(const std::filesystem::path& out, double s, int& exit_code) {
  const std::vector<double> p_primes = {1.5, 3.0, 4.0};
  const Json config{
      {"name", "quadratic_family"},
      {"functional",
       {{"functional", "quadratic"}, {"space", "euclidean"}, {"dim", 1}, {"scale", 1.0}, {"center", {0.0}}}},
      {"p", 2.0},
      {"p_prime", p_primes},
      {"initial_point", euclid({1.0})},
      {"flow", {{"method", "oracle"}, {"horizon", 20.0}, {"nodes", 10000}}}};
  write_json_file(out / "config.json", config);
  const auto run = run_experiment(curated(config, out / "experiment", s));
  exit_code = run.exit_code;
  const Functional f = functional_from_json(config.at("functional"));
  std::vector<Comparison> list;
  for (const auto& t : run.transforms) {
    const auto& r = *t.result;
    const double a = alpha(2.0, t.p_prime);
    const std::string tag = "p' = " + exponent_label(t.p_prime);
    // Closed-form p'-flow on the transformed knots before S*.
    std::vector<double> knots;
    for (double sv : r.transformed.times) {
      if (sv > r.time_map.knots_s.back()) break;
      knots.push_back(sv);
    }
    const auto exact = oracle_flow(f, t.p_prime, euclidean_point({1.0}), knots);
    double sup = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      sup = std::max(sup, distance(f.space(), exact.points[i], r.transformed.points[i]));
    }
    list.push_back({tag + ": sup error against the closed-form p'-flow", sup, 1e-3 * s});
    if (a > 0.0) {
      const double s_star = r.time_map.total_S.infinite ? INFINITY : r.time_map.total_S.value;
      list.push_back({tag + ": |S* - 1/alpha|", std::abs(s_star - 1.0 / a), 1e-3 * s});
    } else {
      list.push_back({tag + ": S* reported finite (1 = yes, expected infinite)",
                      r.time_map.total_S.infinite ? 0.0 : 1.0, 0.0});
    }
  }
  return list;
}

}  // namespace

std::vector<std::string> example_names() {
  return {"blowup_example", "nonuniqueness_example", "normlike_stationary", "quadratic_family"};
}

int reproduce_example(const std::string& name, const std::filesystem::path& out, double tol_scale) {
  const auto started = Clock::now();
  std::vector<Comparison> (*runner)(const std::filesystem::path&, double, int&) = nullptr;
  if (name == "blowup_example") runner = blowup_example;
  if (name == "nonuniqueness_example") runner = nonuniqueness_example;
  if (name == "normlike_stationary") runner = normlike_stationary;
  if (name == "quadratic_family") runner = quadratic_family;
  if (!runner) {
    std::string known;
    for (const auto& n : example_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error("unknown example '" + name + "' (known: " + known + ")");
  }
  if (!(tol_scale > 0.0)) throw Error("tolerance scale must be positive");
  std::filesystem::create_directories(out);
  int experiment_exit = 0;
  const auto comparisons = runner(out, tol_scale, experiment_exit);
  bool passed = experiment_exit == 0;
  Json list = Json::array();
  for (const auto& c : comparisons) {
    passed = passed && c.passed();
    list.push_back(comparison_json(c));
  }
  write_json_file(out / "summary.json", Json{{"example", name},
                                             {"comparisons", list},
                                             {"experiment_exit_code", experiment_exit},
                                             {"passed", passed}});
  write_run_info(out, started, name);
  return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Sweeps

int run_sweep(const Json& sweep, const std::filesystem::path& out, const std::vector<std::string>& overrides,
              double tol_scale) {
  const auto started = Clock::now();
  require_keys(sweep, "sweep config", {"base", "grid", "jobs"});
  if (!sweep.contains("base")) throw Error("sweep config needs a 'base' experiment");
  Json base = sweep.at("base");
  for (const auto& o : overrides) apply_override(base, o);

  std::vector<std::pair<std::string, std::vector<Json>>> axes;
  if (sweep.contains("grid")) {
    for (const auto& [key, values] : sweep.at("grid").items()) {
      if (!values.is_array() || values.empty()) throw Error("sweep grid entry '" + key + "' must be a non-empty list");
      axes.emplace_back(key, std::vector<Json>(values.begin(), values.end()));
    }
  }
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.second.size();

  struct Run {
    std::string name;
    Json params = Json::object();
    Json config;
    int exit_code = 0;
    Json checks = Json::object();
    std::string error;
  };
  std::vector<Run> runs(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::ostringstream name;
    name << "run_" << std::setw(3) << std::setfill('0') << i;
    runs[i].name = name.str();
    runs[i].config = base;
    std::size_t rest = i;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      const auto& value = it->second[rest % it->second.size()];
      rest /= it->second.size();
      set_path(runs[i].config, it->first, value);
      runs[i].params[it->first] = value;
    }
    runs[i].config["output_dir"] = (out / runs[i].name).string();
    runs[i].config["name"] = base.value("name", std::string("sweep")) + "/" + runs[i].name;
  }

  std::size_t jobs = sweep.value("jobs", std::size_t{0});
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, total);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < total; i = next++) {
      Run& r = runs[i];
      try {
        auto cfg = parse_experiment(r.config);
        cfg.scale_tolerances(tol_scale);
        const auto res = run_experiment(cfg);
        r.exit_code = res.exit_code;
        for (const auto& c : res.report.at("checks")) r.checks[c.at("name").get<std::string>()] = c.at("max_residual");
        for (const auto& t : res.report.at("transforms")) {
          if (!t.contains("checks")) continue;
          const std::string prefix = "p" + exponent_label(t.at("p_prime").get<double>()) + ".";
          for (const auto& c : t.at("checks")) r.checks[prefix + c.at("name").get<std::string>()] = c.at("max_residual");
        }
      } catch (const std::exception& e) {
        r.exit_code = 2;
        r.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(out);
  int worst = 0;
  Json rows = Json::array();
  std::set<std::string> columns;
  for (const auto& r : runs) {
    worst = std::max(worst, r.exit_code);
    Json row{{"run", r.name}, {"params", r.params}, {"exit_code", r.exit_code}, {"max_residuals", r.checks}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
    for (const auto& [k, v] : r.checks.items()) {
      (void)v;
      columns.insert(k);
    }
  }
  write_json_file(out / "summary.json", Json{{"runs", rows}, {"exit_code", worst}});

  std::ofstream csv(out / "summary.csv");
  csv << "run";
  for (const auto& axis : axes) csv << ',' << axis.first;
  csv << ",exit_code";
  for (const auto& c : columns) csv << ',' << c;
  csv << '\n' << std::setprecision(17);
  for (const auto& r : runs) {
    csv << r.name;
    for (const auto& axis : axes) csv << ',' << r.params.at(axis.first).dump();
    csv << ',' << r.exit_code;
    for (const auto& c : columns) {
      csv << ',';
      if (r.checks.contains(c)) {
        const auto& v = r.checks.at(c);
        if (v.is_number()) {
          csv << v.get<double>();
        } else {
          csv << v.get<std::string>();
        }
      }
    }
    csv << '\n';
  }
  if (!csv) throw Error("failed writing " + (out / "summary.csv").string());
  write_run_info(out, started, "sweep");
  return worst;
}

}  // namespace maxslope
