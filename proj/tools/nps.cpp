// Role extraction toolkit: SBM graph generation, similarity-spectrum figures,
// misclassification curves and bound verification, from one binary.
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nps/experiments.hpp"

namespace {

void add_common_flags(CLI::App* cmd, nps::ExperimentConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "root seed; every output is a pure function of it");
  cmd->add_option("--out", cfg.out_dir, "output directory (created if missing)");
  cmd->add_option("--trials", cfg.trials, "fresh graphs per grid point");
  cmd->add_option("--n-grid", cfg.n_grid, "strictly increasing scale grid")
      ->delimiter(',');
  cmd->add_option("--p", cfg.p, "cycle-model probability")->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--k", cfg.k, "recurrence depth")->check(CLI::PositiveNumber);
  cmd->add_option("--beta-policy", cfg.beta_policy, "safe | half-gamma | fig4-literal");
  cmd->add_flag("--progress,!--no-progress", cfg.progress, "progress output on stderr");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"neighbourhood-pattern-similarity role extraction toolkit"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "sample SBM digraphs to edge-list files");
  nps::ExperimentConfig gen_cfg;
  gen_cfg.trials = 1;
  add_common_flags(generate, gen_cfg);

  auto* extract =
      app.add_subcommand("extract", "read an edge list and assign a role to every node");
  std::string graph_path, assignment_out, spectrum_csv, truth_path;
  int roles = 3;
  int extract_k = 10;
  std::string extract_policy = "half-gamma";
  std::uint64_t extract_seed = 20240901;
  extract->add_option("graph", graph_path, "edge-list file")->required();
  extract->add_option("-q,--roles", roles, "number of roles")->check(CLI::PositiveNumber);
  extract->add_option("--k", extract_k, "recurrence depth")->check(CLI::PositiveNumber);
  extract->add_option("--beta-policy", extract_policy, "safe | half-gamma | fig4-literal");
  extract->add_option("--out", assignment_out, "assignment output path (default <graph>.roles)");
  extract->add_option("--spectrum-csv", spectrum_csv, "write index,eigenvalue,abs_gap,rel_gap");
  extract->add_option("--truth", truth_path, "ground-truth assignment; prints misclassification");
  extract->add_option("--seed", extract_seed, "seed for the embedding and k-means stages");

  auto* figure2 = app.add_subcommand(
      "figure2", "single-step similarity spectra vs their expectation (beta=0)");
  nps::ExperimentConfig f2_cfg;
  add_common_flags(figure2, f2_cfg);

  auto* figure3 = app.add_subcommand(
      "figure3", "iterated similarity spectra vs their expectation (half-gamma beta)");
  nps::ExperimentConfig f3_cfg;
  add_common_flags(figure3, f3_cfg);

  auto* figure4 =
      app.add_subcommand("figure4", "mean misclassification curves with 3/(10n+24) reference");
  nps::ExperimentConfig f4_cfg;
  add_common_flags(figure4, f4_cfg);
  figure4->add_option("--passes", f4_cfg.passes_per_graph,
                      "single-restart clusterings averaged per graph");

  auto* bounds = app.add_subcommand("bounds", "evaluate both sides of every spectral bound");
  nps::ExperimentConfig b_cfg;
  add_common_flags(bounds, b_cfg);

  auto* conjecture =
      app.add_subcommand("conjecture", "compound-noise norm statistic vs its sharp target");
  nps::ExperimentConfig c_cfg;
  add_common_flags(conjecture, c_cfg);
  conjecture->add_option("--N", c_cfg.conjecture_n, "matrix dimension")
      ->check(CLI::PositiveNumber);
  conjecture->add_option("--conjecture-trials", c_cfg.conjecture_trials, "samples per ensemble")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return nps::cmd_generate(gen_cfg);
    if (extract->parsed())
      return nps::cmd_extract(graph_path, roles, extract_policy, extract_k, assignment_out,
                              spectrum_csv, truth_path, extract_seed);
    if (figure2->parsed()) return nps::cmd_figure2(f2_cfg);
    if (figure3->parsed()) return nps::cmd_figure3(f3_cfg);
    if (figure4->parsed()) return nps::cmd_figure4(f4_cfg);
    if (bounds->parsed()) return nps::cmd_bounds(b_cfg);
    if (conjecture->parsed()) return nps::cmd_conjecture(c_cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
