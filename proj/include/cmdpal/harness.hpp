#pragma once

#include "cmdpal/al.hpp"
#include "cmdpal/ppqa.hpp"

#include <cstdint>
#include <optional>

namespace cmdpal {

struct ExperimentConfig {
  std::string environment;  // "cliff-world" | "deep-sea-treasure"
  std::string algorithm;    // "pqa-alm" | "ppqa-alm" | "npg-pd-baseline"
  int outer_iters = 10;     // T
  int inner_iters = 100;    // K
  double beta = 10.0;
  double sigma = 1.0;
  std::vector<double> primal_steps{0.1, 1.0, 10.0};
  std::vector<double> dual_steps{0.1};           // baseline only
  std::vector<double> surrogate_steps{1.0};      // PPQA zeta grid
  int surrogate_iters = 250;                     // PPQA N
  bool one_hot = true;                           // PPQA feature mode
  std::optional<TileCoderConfig> tile;           // overrides one_hot when set
  double eps_sel = 0.001;
  std::uint64_t seed = 0;
  std::string output_dir;  // empty: no files written

  static ExperimentConfig from_json(const std::string& text);
};

struct RunRecord {
  std::string label;  // grid-point description
  double primal_step = 0.0;
  double dual_step = 0.0;
  double surrogate_step = 0.0;
  AlmTrace trace;
  TabularPolicy final_policy;
  double final_gap = 0.0;        // V* - V_r(rho)
  double final_violation = 0.0;  // max_i (b_i - V_ci(rho)), clipped at 0
  double v_r = 0.0;
  VectorXd v_c;
};

struct ExperimentReport {
  std::vector<RunRecord> runs;
  double v_star = 0.0;
  VectorXd thresholds;
  int best_index = -1;  // -1: no run meets eps_sel
  bool qualifying() const { return best_index >= 0; }
  double best_violation = 0.0;  // smallest violation over all runs
};

/// Runs every grid point deterministically, computes gap/violation against
/// the LP optimum, and selects the min-gap run among those with violation
/// <= eps_sel. Writes CSVs and SVG plots when output_dir is set.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Softmax natural-policy-gradient ascent on the Lagrangian
/// V_r + sum_i lambda_i (V_ci - b_i), alternated with projected (lambda >= 0)
/// dual gradient descent.
std::pair<TabularPolicy, AlmTrace> npg_pd_baseline(const TabularCmdp& cmdp, int T,
                                                   double primal_eta, double dual_eta);

/// Per-run CSVs, a summary CSV, and gap/violation SVG plots.
void emit_outputs(const ExperimentReport& report, const std::string& dir);

}  // namespace cmdpal
