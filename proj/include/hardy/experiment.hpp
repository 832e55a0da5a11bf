#ifndef HARDY_EXPERIMENT_HPP
#define HARDY_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardy/verify.hpp"

namespace hardy {

enum class ExperimentKind {
  Reduction,
  Eikonal,
  Rayleigh,
  Minimizer,
  Sweep,
  Audit,
  Residual,
  Bounds
};
const char* experiment_kind_name(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// One experiment run, loaded from a JSON config file.  Unknown keys are
/// rejected; optional keys fall back to the documented defaults.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Reduction;
  std::string manifold = "euclidean";  // euclidean | hyperbolic | sphere
  int dimension = 4;
  double curvature_scale = 1.0;  // hyperbolic only
  std::vector<std::vector<double>> poles;
  double p = 2.0;
  std::vector<double> eps_list;
  long samples = 200000;
  std::uint64_t seed = 1;
  std::string output_path = "hardy_report";
  // optional tuning keys
  int bump_count = 0;  // 0 = experiment default (20 for rayleigh, 5 for residual)
  std::string potential_tag = "full";
  double pole_ball_radius = 0.0;
  double importance_exponent = 0.0;
  long max_resamples = 100000;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// One CSV row; fixed column order
/// experiment,manifold,N,p,eps,I,I_stderr,J,J_stderr,K,K_stderr,ratio,margin,pass
/// with absent quantities rendered as empty fields.
struct CsvRow {
  std::string experiment;
  std::string manifold;
  int N = 0;
  double p = 0.0;
  std::optional<double> eps, I, I_stderr, J, J_stderr, K, K_stderr, ratio, margin;
  bool pass = false;
};

struct ExperimentResult {
  std::vector<CsvRow> rows;
  nlohmann::ordered_json report;
  bool all_pass = true;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string render_csv(const std::vector<CsvRow>& rows);

/// Stable one-line-per-experiment table: name, required fields, claim checked.
std::string list_experiments();

}  // namespace hardy

#endif
