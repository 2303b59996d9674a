#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maxslope/flow.hpp"
#include "maxslope/functional.hpp"
#include "maxslope/io.hpp"
#include "maxslope/transform.hpp"

namespace maxslope {

/// One checker toggle. A disabled checker is not run and never affects the
/// exit status.
struct CheckSetting {
  bool enabled = true;
  double tolerance = 0.0;
};

struct ExperimentChecks {
  CheckSetting energy_identity{true, 1e-2};
  CheckSetting lipschitz{true, 1e-8};
  CheckSetting reparametrized_identity{true, 1e-2};
  CheckSetting convexity{true, 1e-6};
  CheckSetting regularizing{true, 1e-6};
  CheckSetting slope_monotone{true, 1e-8};
  CheckSetting global_slope{false, 1e-2};
  CheckSetting duality{true, 1e-3};
  CheckSetting transformed_energy{true, 1e-2};
};

enum class FlowMethod { kSolver, kOracle, kFile };

struct FlowSpec {
  FlowMethod method = FlowMethod::kSolver;
  /// Oracle grid: `nodes` equally spaced times on [0, horizon].
  double horizon = 50.0;
  std::size_t nodes = 1001;
  double theta = 0.0;
  /// Curve JSON to load when method is kFile.
  std::string path;
};

/// Parsed experiment. Every field has a documented default; see README.
struct ExperimentConfig {
  std::string name = "experiment";
  Json functional_spec;
  double p = 2.0;
  std::vector<double> p_primes;
  Json initial_point;
  FlowSpec flow;
  /// Horizon defaults to 50 here so that tail fits for S* see a long grid.
  SolverConfig solver = [] {
    SolverConfig s;
    s.horizon = 50.0;
    return s;
  }();
  TransformOptions transform;
  ExperimentChecks checks;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;

  /// Multiplies every checker tolerance by `factor` (> 0).
  void scale_tolerances(double factor);
};

/// Replaces the value at a dotted path ("solver.tau", "p_prime.0") in
/// `config`. The value is parsed as JSON when possible, as a string otherwise.
void apply_override(Json& config, const std::string& assignment);

/// Throws Error on unknown keys, bad types or non-positive tolerances.
ExperimentConfig parse_experiment(const Json& config);

/// Report of one checker run inside an experiment.
struct CheckOutcome {
  DiagnosticsReport report;
  bool enabled = true;
  std::string note;  ///< why a check was skipped, when it was
};

struct TransformOutcome {
  double p_prime = 2.0;
  std::optional<TransformResult> result;
  std::vector<CheckOutcome> checks;
  std::string refusal;  ///< hypothesis violation message, empty when accepted
};

struct ExperimentResult {
  std::string name;
  SampledCurve flow;
  std::vector<CheckOutcome> checks;
  std::vector<TransformOutcome> transforms;
  int exit_code = 0;
  Json report;  ///< deterministic summary written to reports.json
};

enum class ExperimentStage { kSolve, kTransform, kVerify };

/// Builds the p-flow, runs transforms and (for kVerify) every enabled
/// checker, and writes curve.csv, curve.json, reports.json, one
/// transform_<p'>.json and curve_<p'>.csv per exponent, and run_info.json
/// (timestamps) into the output directory. Exit code 0 iff every enabled
/// checker passed or belongs to a transform reported as blocked; a refused
/// transform or a failed checker gives 1.
ExperimentResult run_experiment(const ExperimentConfig& config, ExperimentStage stage = ExperimentStage::kVerify);

/// Names accepted by `reproduce_example`.
std::vector<std::string> example_names();

/// Runs a curated configuration, compares against closed forms and writes
/// summary.json plus curves into `out`. Returns 0 iff all comparisons pass.
/// Throws Error for an unknown name.
int reproduce_example(const std::string& name, const std::filesystem::path& out, double tol_scale = 1.0);

/// Sweep file: {"base": {...experiment...}, "grid": {"solver.tau": [1e-2, 1e-3]}, "jobs": 4}.
/// Every point of the Cartesian grid runs in its own subdirectory of `out`;
/// summary.json and summary.csv collect one row per run. Returns the
/// largest exit code over all runs.
int run_sweep(const Json& sweep, const std::filesystem::path& out, const std::vector<std::string>& overrides,
              double tol_scale = 1.0);

}  // namespace maxslope
