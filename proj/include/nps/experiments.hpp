#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "nps/csv.hpp"
#include "nps/sbm.hpp"
#include "nps/similarity.hpp"

namespace nps {

// Shared configuration for the experiment commands. Defaults reproduce the
// desk-scale runs; the flags of the CLI map onto these fields 1:1.
struct ExperimentConfig {
  double p = 0.6;                          // cycle-model probability for single-model commands
  std::vector<double> p_panels{0.6, 0.75}; // one chart panel per value for the spectrum figures
  std::vector<int> n_grid{10, 20, 30, 40, 50};
  int k = 10;
  std::string beta_policy = "half-gamma"; // safe | half-gamma | fig4-literal
  int trials = 500;                       // fresh graphs per grid point (error-curve command)
  int passes_per_graph = 10;              // single-restart clusterings averaged per graph
  std::uint64_t seed = 20240901;
  std::string out_dir = "out";
  bool progress = true;
  int conjecture_n = 1000;
  int conjecture_trials = 10;

  BetaPolicy policy() const;
  void validate() const;
};

// Mean misclassification of the embedding-based estimator over fresh graphs.
// Each graph is clustered `passes` times with an independent single-seeding
// k-means and the error is averaged over all (graph, pass) pairs; k=1 uses
// the plain dominant-subspace embedding and ignores the β policy.
struct ErrorCurvePoint {
  int n = 0;
  int graphs = 0;
  int passes = 0;
  double mean_fhat = 0.0;
};

ErrorCurvePoint mean_misclassification_curve_point(const RoleModel<double>& model, int n,
                                                   int graphs, int passes, int k,
                                                   const BetaPolicy& policy, std::uint64_t seed,
                                                   bool progress, const std::string& tag);

// Subcommand entry points; each returns a process exit code.
int cmd_generate(const ExperimentConfig& cfg);
int cmd_extract(const std::string& graph_path, int q, const std::string& beta_policy, int k,
                const std::string& assignment_out, const std::string& spectrum_csv,
                const std::string& truth_path, std::uint64_t seed);
int cmd_figure2(const ExperimentConfig& cfg);
int cmd_figure3(const ExperimentConfig& cfg);
int cmd_figure4(const ExperimentConfig& cfg);
int cmd_bounds(const ExperimentConfig& cfg);
int cmd_conjecture(const ExperimentConfig& cfg);

// Exposed for tests: the CSV tables backing the figure commands.
CsvTable spectrum_figure_table(const ExperimentConfig& cfg, int k_steps);
CsvTable error_curve_table(const ExperimentConfig& cfg, bool include_iterated);
BetaPolicy parse_beta_policy(const std::string& name);

} // namespace nps
