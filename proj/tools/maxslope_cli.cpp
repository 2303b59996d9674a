#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maxslope/errors.hpp"
#include "maxslope/experiment.hpp"

namespace ms = maxslope;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  double tol_scale = 1.0;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "Experiment config (JSON)");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory (overrides output_dir)");
  cmd->add_option("--set", c.sets, "Override a config value, e.g. --set solver.tau=1e-4")->take_all();
  cmd->add_option("--tol-scale", c.tol_scale, "Multiply every checker tolerance")->check(CLI::PositiveNumber);
}

ms::ExperimentConfig load_config(const Common& c) {
  ms::Json j = ms::read_json_file(c.config);
  for (const auto& s : c.sets) ms::apply_override(j, s);
  if (!c.out.empty()) j["output_dir"] = c.out;
  auto cfg = ms::parse_experiment(j);
  cfg.scale_tolerances(c.tol_scale);
  return cfg;
}

void print_check(const ms::Json& c, const char* indent) {
  const bool skipped = c.value("skipped", false);
  const char* tag = skipped ? "skip" : (c.at("passed").get<bool>() ? "pass" : "FAIL");
  std::cout << indent << tag << "  " << c.at("name").get<std::string>() << "  max=" << c.at("max_residual").dump()
            << "  tol=" << c.at("tolerance").dump();
  if (c.contains("note")) std::cout << "  (" << c.at("note").get<std::string>() << ")";
  std::cout << '\n';
}

int run_stage(const Common& c, ms::ExperimentStage stage) {
  const auto cfg = load_config(c);
  const auto result = ms::run_experiment(cfg, stage);
  const auto& report = result.report;
  const auto& t_star = report.at("horizon").at("t_star");
  std::cout << cfg.name << ": " << report.at("flow").at("nodes").get<std::size_t>() << " nodes, t* = "
            << (t_star.is_string() ? t_star.get<std::string>() : t_star.dump())
            << (report.at("horizon").at("stopped").get<bool>() ? " (stopped)" : "") << '\n';
  for (const auto& ch : report.at("checks")) print_check(ch, "  ");
  for (const auto& t : report.at("transforms")) {
    std::cout << "  transform p=" << t.at("p").dump() << " -> p'=" << t.at("p_prime").dump() << ": "
              << t.at("status").get<std::string>();
    if (t.contains("refusal")) {
      std::cout << " (" << t.at("refusal").get<std::string>() << ")\n";
      continue;
    }
    std::cout << ", case " << t.at("case").get<std::string>() << ", condition " << t.at("condition").get<std::string>()
              << ", S* = " << t.at("S_star").at("value").dump() << (t.at("S_star").at("infinite").get<bool>() ? " (inf)" : "")
              << '\n';
    if (t.contains("checks")) {
      for (const auto& ch : t.at("checks")) print_check(ch, "    ");
    }
  }
  std::cout << "status: " << report.at("status").get<std::string>() << "  (reports in " << cfg.output_dir.string()
            << ")\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-curves of maximal slope: solve, transform and verify"};
  app.require_subcommand(1);

  Common solve_opts, transform_opts, verify_opts, sweep_opts;
  auto* solve = app.add_subcommand("solve", "Compute the p-flow and export it");
  add_common(solve, solve_opts, true);
  auto* transform = app.add_subcommand("transform", "Compute the p-flow and its exponent transforms");
  add_common(transform, transform_opts, true);
  auto* verify = app.add_subcommand("verify", "Run the full pipeline with every enabled checker");
  add_common(verify, verify_opts, true);

  std::string example;
  std::string reproduce_out;
  double reproduce_scale = 1.0;
  auto* reproduce = app.add_subcommand("reproduce", "Run a curated example and compare with closed forms");
  reproduce->add_option("name", example, "Example name")->required()->check(CLI::IsMember(ms::example_names()));
  reproduce->add_option("--out", reproduce_out, "Output directory (default: reproduce/<name>)");
  reproduce->add_option("--tol-scale", reproduce_scale, "Multiply every tolerance")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Run a grid of experiments, one directory per run");
  add_common(sweep, sweep_opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_stage(solve_opts, ms::ExperimentStage::kSolve);
    if (*transform) return run_stage(transform_opts, ms::ExperimentStage::kTransform);
    if (*verify) return run_stage(verify_opts, ms::ExperimentStage::kVerify);
    if (*reproduce) {
      const std::string out = reproduce_out.empty() ? "reproduce/" + example : reproduce_out;
      const int code = ms::reproduce_example(example, out, reproduce_scale);
      const auto summary = ms::read_json_file(std::filesystem::path(out) / "summary.json");
      for (const auto& c : summary.at("comparisons")) {
        std::cout << (c.at("passed").get<bool>() ? "  pass  " : "  FAIL  ") << c.at("name").get<std::string>()
                  << ": " << c.at("measured").dump() << '\n';
      }
      std::cout << example << ": " << (code == 0 ? "pass" : "fail") << "  (summary in " << out << ")\n";
      return code;
    }
    if (*sweep) {
      const std::string out = sweep_opts.out.empty() ? "sweep" : sweep_opts.out;
      const int code = ms::run_sweep(ms::read_json_file(sweep_opts.config), out, sweep_opts.sets, sweep_opts.tol_scale);
      std::cout << "sweep finished with exit code " << code << "  (summary in " << out << ")\n";
      return code;
    }
  } catch (const ms::HypothesisError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
