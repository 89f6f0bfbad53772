#pragma once

#include "cmdpal/al.hpp"

#include <cstdint>

namespace cmdpal {

/// Dense per-(s,a) feature table, rows l2-normalized to at most 1.
struct FeatureMap {
  MatrixXd phi;  // (S*A) x d, row s*A + a
  int dim() const { return static_cast<int>(phi.cols()); }

  std::string to_json() const;
  static FeatureMap from_json(const std::string& text);
};

/// softmax_a <phi(s,a), theta>.
struct LogLinearPolicy {
  VectorXd theta;
  FeatureMap features;
  int n_states = 0;
  int n_actions = 0;
};

struct TileCoderConfig {
  int table_size = 40;   // feature dimension d
  int num_tilings = 4;
  int tile_size = 1;     // cells per tile edge
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

/// Hashed tile-coded features for a rows x cols grid with row-major state
/// indexing; deterministic for a fixed seed, collisions allowed.
FeatureMap tile_code(const TileCoderConfig& config, int rows, int cols, int n_actions);

/// phi(s,a) = e_{sA+a}; the zero-bias anchor for PPQA.
FeatureMap one_hot_features(int n_states, int n_actions);

/// Softmax rows with max subtraction.
TabularPolicy log_linear_probs(const LogLinearPolicy& policy);

/// Cross-entropy surrogate l(theta) = sum_s d(s) E_{a~target}[-log pi_theta(a|s)]
/// with its exact gradient sum_s d(s) sum_a (pi_theta(a|s) - target(a|s)) phi(s,a).
std::pair<double, VectorXd> surrogate_loss_and_grad(const VectorXd& d_weights,
                                                    const TabularPolicy& target,
                                                    const LogLinearPolicy& policy);

struct PpqaConfig {
  double eta = 1.0;             // tabular half-step size
  int surrogate_steps = 250;    // N
  double surrogate_step = 1.0;  // zeta, <= 1 for the 1-smooth surrogate
  int max_iters = 100;          // K
};

struct PpqaStepInfo {
  double loss_initial = 0.0;
  double loss_final = 0.0;
  bool diverged = false;  // loss increased over the N steps
};

/// One PPQA update: tabular PQA half-step target, then N gradient-descent
/// steps on the surrogate initialized at the current theta.
LogLinearPolicy ppqa_update(const TabularCmdp& cmdp, const DualState& dual,
                            const LogLinearPolicy& policy, const PpqaConfig& config,
                            PpqaStepInfo* info = nullptr);

/// K ppqa_update iterations; returns the induced tabular policy and K.
std::pair<TabularPolicy, long> solve_subproblem_ppqa(const TabularCmdp& cmdp,
                                                     const DualState& dual,
                                                     LogLinearPolicy& policy,
                                                     const PpqaConfig& config);

/// Oracle wrapper owning a persistent theta across outer iterations.
SubproblemOracle make_ppqa_oracle(const FeatureMap& features, const PpqaConfig& config);

}  // namespace cmdpal
