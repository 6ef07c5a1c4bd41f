// Command-line front end: ingests a flat key=value config (or a previously
// emitted summary.json), runs one experiment, and writes CSV/JSON/SVG
// artifacts into the output directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "icg/analysis.hpp"
#include "icg/designer.hpp"
#include "icg/finite.hpp"
#include "icg/kernel.hpp"
#include "icg/normal.hpp"
#include "icg/processes.hpp"
#include "serialize.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace icg;
using namespace icg::tool;

namespace {

constexpr int kSchemaVersion = 1;

struct ExitWithCode {
  int code;
  std::string message;
};

class Config {
 public:
  explicit Config(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    consumed_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }
  std::string require_str(const std::string& key) {
    consumed_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) {
      throw std::invalid_argument("missing config key: " + key);
    }
    return it->second;
  }
  double num(const std::string& key, double fallback) {
    return has(key) ? parse_double(require_str(key)) : (consumed_.insert(key), fallback);
  }
  double require_num(const std::string& key) {
    return parse_double(require_str(key));
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    double v = num(key, static_cast<double>(fallback));
    if (v < 0 || v != std::floor(v)) {
      throw std::invalid_argument("key " + key + " must be a whole number");
    }
    return static_cast<std::size_t>(v);
  }
  std::vector<double> list(const std::string& key) {
    return parse_list(require_str(key));
  }

  // Every key must have been consumed by the handler.
  void finish() const {
    for (const auto& [key, value] : kv_) {
      if (!consumed_.count(key)) {
        throw std::invalid_argument("unknown config key: " + key);
      }
    }
  }

  const std::map<std::string, std::string>& raw() const { return kv_; }
  void set(const std::string& key, const std::string& value) {
    kv_[key] = value;
  }

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> consumed_;
};

std::map<std::string, std::string> load_key_value(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line is not key=value: " + t);
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> load_summary_echo(const std::string& path,
                                                     std::string& command) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read summary file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad summary json: ") + e.what());
  }
  if (!j.contains("config_echo") || !j["config_echo"].is_object()) {
    throw std::invalid_argument("summary json lacks a config_echo object");
  }
  std::map<std::string, std::string> kv;
  for (auto& [key, value] : j["config_echo"].items()) {
    if (key == "command") {
      if (command.empty()) command = value.get<std::string>();
      continue;
    }
    kv[key] = value.get<std::string>();
  }
  return kv;
}

LearningSpec spec_from(Config& cfg) {
  std::string tag = cfg.str("spec", "iid");
  if (tag == "iid") return IidSignals{cfg.require_num("sigma")};
  if (tag == "oneshot") return OneShotSignal{cfg.require_num("sigma")};
  if (tag == "social_doubling") return SocialDoubling{cfg.require_num("sigma")};
  if (tag == "power") {
    return PowerPrecision{cfg.require_num("coeff"), cfg.require_num("exponent")};
  }
  if (tag == "geometric") {
    return GeometricPrecision{cfg.require_num("coeff"), cfg.require_num("ratio")};
  }
  if (tag == "explicit") return ExplicitVariances{cfg.list("sigma2")};
  throw std::invalid_argument("unknown spec tag: " + tag);
}

GameConfig game_from(Config& cfg) {
  return GameConfig(cfg.require_num("c"), cfg.require_num("lambda0"),
                    cfg.num("a", 1.0), cfg.num("b", 1.0));
}

std::size_t spec_horizon_cap(const LearningSpec& spec, std::size_t T) {
  if (const auto* e = std::get_if<ExplicitVariances>(&spec)) {
    return std::min(T, e->sigma2.size());
  }
  return T;
}

const char* growth_name(GrowthClass g) {
  switch (g) {
    case GrowthClass::SubQuadratic: return "SubQuadratic";
    case GrowthClass::SuperQuadratic: return "SuperQuadratic";
    default: return "Indeterminate";
  }
}

const char* regime_name(Transition t) {
  switch (t) {
    case Transition::Sudden: return "Sudden";
    case Transition::Gradual: return "Gradual";
    default: return "Mixed";
  }
}

json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

struct Context {
  std::string command;
  fs::path out_dir;
  bool plot = false;
  bool strict = false;
  Config* cfg = nullptr;

  fs::path path(const std::string& name) const { return out_dir / name; }

  void write_summary(json mu_inf, json gamma_inf, json converged, json regime,
                     json diagnostics) const {
    json echo;
    for (const auto& [key, value] : cfg->raw()) echo[key] = value;
    echo["command"] = command;
    json summary = {{"schema_version", kSchemaVersion},
                    {"config_echo", echo},
                    {"mu_inf", std::move(mu_inf)},
                    {"gamma_inf", std::move(gamma_inf)},
                    {"converged", std::move(converged)},
                    {"regime", std::move(regime)},
                    {"diagnostics", std::move(diagnostics)}};
    std::ofstream out(path("summary.json"));
    out << summary.dump(2) << "\n";
  }
};

constexpr const char* kPathHeader = "t,mu_star,gamma,A,eta2,lambda";

void write_path_csv(const fs::path& file, const ThresholdPath& path,
                    const PosteriorSchedule& schedule, const PlayPath& play) {
  CsvWriter csv(file.string(), kPathHeader);
  for (std::size_t t = 1; t <= path.size(); ++t) {
    csv.row({static_cast<double>(t), path.mu_star[t - 1], path.gamma[t - 1],
             t >= 2 ? schedule.step_scale(t)
                    : std::numeric_limits<double>::quiet_NaN(),
             schedule.eta2(t), play.lambda[t - 1]});
  }
}

json classify_or_null(const PosteriorSchedule& schedule, double delta) {
  if (schedule.size() < 8) return nullptr;
  GrowthReport report = classify_growth(schedule, 1, schedule.size(), delta);
  return growth_name(report.verdict);
}

void cmd_simulate(Context& ctx) {
  Config& cfg = *ctx.cfg;
  GameConfig game = game_from(cfg);
  LearningSpec spec = spec_from(cfg);
  std::size_t T = cfg.count("T", 100);
  double theta = cfg.num("theta", 0.0);
  double tol = cfg.num("tol", 1e-6);
  std::size_t T_max =
      spec_horizon_cap(spec, std::max(cfg.count("T_max", 10000), T));
  double delta = cfg.num("delta", 0.1);
  cfg.finish();

  if (T == 0) {
    std::ofstream(ctx.path("thresholds.csv")) << kPathHeader << "\n";
    std::ofstream(ctx.path("play.csv")) << kPathHeader << "\n";
    ctx.write_summary(nullptr, nullptr, false, nullptr, json::object());
    return;
  }

  PosteriorSchedule schedule = materialize(spec, T);
  ThresholdPath path = threshold_path(game, schedule, T);
  PlayPath play = aggregate_play(theta, path, schedule);
  write_path_csv(ctx.path("thresholds.csv"), path, schedule, play);
  write_path_csv(ctx.path("play.csv"), path, schedule, play);

  LimitReport limit = limit_threshold(game, spec, tol, T_max);
  double residual_max = 0.0;
  for (double r : path.residual) residual_max = std::max(residual_max, r);
  json diagnostics = {{"periods_used", limit.periods_used},
                      {"frozen", limit.frozen},
                      {"last_step", limit.last_step},
                      {"max_residual", residual_max},
                      {"theta", theta},
                      {"final_lambda", play.lambda.back()}};
  ctx.write_summary(limit.mu_inf, limit.gamma_inf, limit.converged,
                    classify_or_null(schedule, delta), diagnostics);

  if (ctx.plot) {
    write_svg(ctx.path("plot.svg").string(),
              {{"mu_star", "#1f77b4", path.mu_star},
               {"lambda", "#d62728", play.lambda}});
  }
  if (ctx.strict && !limit.converged) {
    throw ExitWithCode{4, "limit threshold unconverged"};
  }
}

void cmd_limit(Context& ctx) {
  Config& cfg = *ctx.cfg;
  GameConfig game = game_from(cfg);
  LearningSpec spec = spec_from(cfg);
  double tol = cfg.num("tol", 1e-6);
  std::size_t T_max = spec_horizon_cap(spec, cfg.count("T_max", 100000));
  cfg.finish();

  LimitReport limit = limit_threshold(game, spec, tol, T_max);
  json diagnostics = {{"periods_used", limit.periods_used},
                      {"frozen", limit.frozen},
                      {"last_step", limit.last_step}};
  ctx.write_summary(limit.mu_inf, limit.gamma_inf, limit.converged, nullptr,
                    diagnostics);
  if (ctx.strict && !limit.converged) {
    throw ExitWithCode{4, "limit threshold unconverged"};
  }
}

void cmd_classify(Context& ctx) {
  Config& cfg = *ctx.cfg;
  LearningSpec spec = spec_from(cfg);
  std::size_t T = spec_horizon_cap(spec, cfg.count("T", 512));
  std::size_t first = cfg.count("first", std::max<std::size_t>(1, T / 2));
  std::size_t last = cfg.count("last", T);
  double delta = cfg.num("delta", 0.1);
  cfg.finish();

  GrowthReport report = classify_growth(materialize(spec, T), first, last, delta);
  json diagnostics = {{"verdict", growth_name(report.verdict)},
                      {"exponent", report.exponent},
                      {"super_polynomial", report.super_polynomial},
                      {"window", {first, last}},
                      {"delta", delta}};
  ctx.write_summary(nullptr, nullptr, true, growth_name(report.verdict),
                    diagnostics);
}

void cmd_design(Context& ctx) {
  Config& cfg = *ctx.cfg;
  DesignTarget target(cfg.require_num("target"), cfg.require_num("lambda0"),
                      cfg.require_num("c"));
  std::size_t verify_T = cfg.count("verify_T", 400);
  cfg.finish();

  DesignResult d = design_process(target, verify_T);
  json sigma2 = json::array();
  for (double v : d.sigma2) sigma2.push_back(number_or_null(v));
  json out = {{"schema_version", kSchemaVersion},
              {"target", target.mu_target},
              {"achieved_mu_inf", d.achieved_mu_inf},
              {"gamma_star", d.gamma_star},
              {"gamma2", d.gamma2},
              {"truncation", d.truncation},
              {"eta1_sq", d.eta1_sq},
              {"A", d.A},
              {"eta2", d.eta2},
              {"sigma2", sigma2},
              {"diagnostics",
               {{"ratio", d.diagnostics.ratio},
                {"gamma2_margin", d.diagnostics.gamma2_margin},
                {"sandwich_min_slack", d.diagnostics.sandwich_min_slack},
                {"eta1_lower_bound", d.diagnostics.eta1_lower_bound},
                {"c_lo", d.diagnostics.c_lo},
                {"c_hi", d.diagnostics.c_hi},
                {"tail_bound", d.diagnostics.tail_bound}}}};
  std::ofstream(ctx.path("design.json")) << out.dump(2) << "\n";
  ctx.write_summary(d.achieved_mu_inf, nullptr, true, nullptr,
                    out["diagnostics"]);
}

void cmd_finite(Context& ctx) {
  Config& cfg = *ctx.cfg;
  GameConfig game = game_from(cfg);
  LearningSpec spec = spec_from(cfg);
  FiniteSimConfig fsc;
  fsc.theta = cfg.num("theta", 0.0);
  fsc.T = cfg.count("T", 50);
  fsc.seed = static_cast<std::uint64_t>(cfg.count("seed", 0));
  fsc.replications = cfg.count("replications", 1);
  fsc.threads = cfg.count("threads", 1);
  std::vector<double> grid = cfg.has("N_grid")
                                 ? cfg.list("N_grid")
                                 : std::vector<double>{static_cast<double>(
                                       cfg.count("N", 1000))};
  cfg.str("N_grid", "");
  cfg.str("N", "");
  cfg.finish();

  CsvWriter csv(ctx.path("finite.csv").string(), "N,rep,sup_error");
  std::vector<FiniteSimResult> results;
  for (double n : grid) {
    if (n < 1 || n != std::floor(n)) {
      throw std::invalid_argument("N values must be positive whole numbers");
    }
    fsc.N = static_cast<std::size_t>(n);
    results.push_back(simulate_finite(game, spec, fsc));
    const FiniteSimResult& r = results.back();
    for (std::size_t rep = 0; rep < r.sup_error.size(); ++rep) {
      csv.row({n, static_cast<double>(rep), r.sup_error[rep]});
    }
  }
  json table = json::array();
  if (results.size() >= 2) {
    for (const auto& row : concentration_report(results)) {
      table.push_back({{"N", row.N},
                       {"mean_sup_error", row.mean_sup_error},
                       {"p95_sup_error", row.p95_sup_error}});
    }
  }
  json diagnostics = {{"seed", fsc.seed},
                      {"replications", fsc.replications},
                      {"concentration", table}};
  ctx.write_summary(nullptr, nullptr, true, nullptr, diagnostics);
}

void cmd_phase(Context& ctx) {
  Config& cfg = *ctx.cfg;
  double c = cfg.require_num("c");
  LearningSpec spec = spec_from(cfg);
  std::vector<double> lambda0_grid = cfg.list("lambda0_grid");
  std::vector<double> theta_grid = cfg.list("theta_grid");
  std::size_t T_max = spec_horizon_cap(spec, cfg.count("T_max", 100000));
  cfg.finish();

  PhaseDiagram diagram = phase_diagram(spec, c, lambda0_grid, theta_grid, T_max);
  CsvWriter csv(ctx.path("phase.csv").string(),
                "lambda0,theta,limit_action,mu_inf");
  for (const auto& cell : diagram.cells) {
    csv.row({cell.lambda0, cell.theta, static_cast<double>(cell.limit_action),
             cell.mu_inf});
  }
  json boundary = json::array();
  for (const auto& [l0, mu] : diagram.boundary) {
    boundary.push_back({{"lambda0", l0}, {"mu_inf", mu}});
  }
  ctx.write_summary(nullptr, nullptr, true, nullptr,
                    json{{"boundary", boundary}});
  if (ctx.plot) {
    Series s{"mu_inf", "#1f77b4", {}};
    for (const auto& [l0, mu] : diagram.boundary) s.values.push_back(mu);
    write_svg(ctx.path("plot.svg").string(), {s});
  }
}

void cmd_transition(Context& ctx) {
  Config& cfg = *ctx.cfg;
  GameConfig game = game_from(cfg);
  double sigma = cfg.require_num("sigma");
  double theta = cfg.require_num("theta");
  std::size_t T = cfg.count("T", 400);
  double epsilon = cfg.num("epsilon", 0.05);
  double alpha = cfg.num("alpha", 0.5);
  double beta_bar = 1.0 + 0.5 * std::abs(game.c - 0.5 - theta);
  double beta = cfg.num("beta", std::min(1.04, 0.5 * (1.0 + beta_bar)));
  cfg.finish();

  LearningSpec spec = IidSignals{sigma};
  PosteriorSchedule schedule = materialize(spec, T);
  ThresholdPath path = threshold_path(game, schedule, T);
  PlayPath play = aggregate_play(theta, path, schedule);
  write_path_csv(ctx.path("play.csv"), path, schedule, play);

  TransitionReport report =
      detect_transition(play, theta, game, epsilon, alpha, beta, sigma);
  json diagnostics = {{"T_cross", report.T_cross},
                      {"max_step", report.max_step},
                      {"first_step", report.first_step},
                      {"epsilon", report.epsilon},
                      {"alpha", report.alpha},
                      {"beta", report.beta},
                      {"beta_bar", report.beta_bar},
                      {"analytic_step_bound", report.analytic_step_bound}};
  ctx.write_summary(nullptr, nullptr, true, regime_name(report.regime),
                    diagnostics);
  if (ctx.plot) {
    write_svg(ctx.path("plot.svg").string(),
              {{"lambda", "#d62728", play.lambda}});
  }
}

void cmd_reduce(Context& ctx) {
  Config& cfg = *ctx.cfg;
  PastPlaySpec spec;
  spec.sigma2 = cfg.list("sigma2");
  spec.tau2 = cfg.list("tau2");
  std::size_t T = cfg.count("T", spec.sigma2.size());
  cfg.finish();

  ExplicitVariances reduced = reduce_past_play_signals(spec, T);
  CsvWriter csv(ctx.path("reduced.csv").string(), "t,sigma2");
  json values = json::array();
  for (std::size_t t = 1; t <= reduced.sigma2.size(); ++t) {
    csv.row({static_cast<double>(t), reduced.sigma2[t - 1]});
    values.push_back(number_or_null(reduced.sigma2[t - 1]));
  }
  ctx.write_summary(nullptr, nullptr, true, nullptr,
                    json{{"reduced_sigma2", values}});
}

void cmd_refine(Context& ctx) {
  Config& cfg = *ctx.cfg;
  LearningSpec spec = spec_from(cfg);
  std::size_t n = cfg.count("n", 2);
  std::size_t T = spec_horizon_cap(spec, cfg.count("T", 100));
  cfg.finish();

  PosteriorSchedule refined = refine_time_grid(spec, n, T);
  CsvWriter csv(ctx.path("refined.csv").string(), "s,precision,eta2,sigma2");
  for (std::size_t s = 1; s <= refined.size(); ++s) {
    csv.row({static_cast<double>(s), refined.precision(s), refined.eta2(s),
             refined.sigma2(s)});
  }
  ctx.write_summary(nullptr, nullptr, true, nullptr,
                    json{{"n", n}, {"sub_periods", refined.size()}});
}

void cmd_idsds(Context& ctx) {
  Config& cfg = *ctx.cfg;
  double eta = cfg.require_num("eta");
  double c = cfg.require_num("c");
  std::size_t k_max = cfg.count("k_max", 10000);
  cfg.finish();

  IdsdsCutoffs cutoffs = idsds_contemporaneous_cutoffs(eta, c, k_max);
  CsvWriter csv(ctx.path("idsds.csv").string(), "k,upper,lower");
  for (std::size_t k = 0; k < cutoffs.upper.size(); ++k) {
    csv.row({static_cast<double>(k), cutoffs.upper[k], cutoffs.lower[k]});
  }
  json diagnostics = {{"iterations", cutoffs.upper.size() - 1},
                      {"upper_limit", cutoffs.upper.back()},
                      {"lower_limit", cutoffs.lower.back()}};
  ctx.write_summary(nullptr, nullptr, cutoffs.converged, nullptr, diagnostics);
  if (ctx.strict && !cutoffs.converged) {
    throw ExitWithCode{4, "idsds sandwich did not close"};
  }
}

int dispatch(Context& ctx) {
  if (ctx.command == "simulate") cmd_simulate(ctx);
  else if (ctx.command == "limit") cmd_limit(ctx);
  else if (ctx.command == "classify") cmd_classify(ctx);
  else if (ctx.command == "design") cmd_design(ctx);
  else if (ctx.command == "finite") cmd_finite(ctx);
  else if (ctx.command == "phase") cmd_phase(ctx);
  else if (ctx.command == "transition") cmd_transition(ctx);
  else if (ctx.command == "reduce") cmd_reduce(ctx);
  else if (ctx.command == "refine") cmd_refine(ctx);
  else if (ctx.command == "idsds") cmd_idsds(ctx);
  else throw std::invalid_argument("unknown command: " + ctx.command);
  return 0;
}

int fail(int code, const std::string& message) {
  std::cerr << json{{"code", code}, {"error", message}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "icg: equilibrium threshold dynamics under Gaussian social learning"};
  std::string command, config_path, summary_path, out_dir = ".";
  std::uint64_t seed = 0;
  bool plot = false, strict = false;
  app.add_option("command",
                 command,
                 "simulate|limit|classify|design|finite|phase|transition|"
                 "reduce|refine|idsds (optional with --config)");
  app.add_option("config_file", config_path, "key=value config file");
  app.add_option("--config", summary_path,
                 "re-ingest a previously emitted summary.json");
  app.add_option("--out", out_dir, "output directory (default .)");
  auto* seed_opt = app.add_option("--seed", seed, "override the seed key");
  app.add_flag("--plot", plot, "emit plot.svg");
  app.add_flag("--strict", strict, "treat unconverged results as errors");
  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::string> kv;
    if (!summary_path.empty()) {
      kv = load_summary_echo(summary_path, command);
    } else if (!config_path.empty()) {
      kv = load_key_value(config_path);
    }
    if (command.empty()) {
      throw std::invalid_argument("no command given");
    }
    Config cfg(std::move(kv));
    if (seed_opt->count() > 0) cfg.set("seed", std::to_string(seed));

    Context ctx;
    ctx.command = command;
    ctx.out_dir = out_dir;
    ctx.plot = plot;
    ctx.strict = strict;
    ctx.cfg = &cfg;
    fs::create_directories(ctx.out_dir);
    return dispatch(ctx);
  } catch (const ExitWithCode& e) {
    return fail(e.code, e.message);
  } catch (const std::invalid_argument& e) {
    return fail(2, e.what());
  } catch (const std::domain_error& e) {
    return fail(2, e.what());
  } catch (const std::length_error& e) {
    return fail(2, e.what());
  } catch (const std::out_of_range& e) {
    return fail(2, e.what());
  } catch (const std::exception& e) {
    return fail(3, e.what());
  }
}
