#pragma once

#include "cmdpal/al.hpp"

namespace cmdpal {

struct PqaConfig {
  double eta = 1.0;          // ignored when auto_eta
  bool auto_eta = false;     // eta = rho_min / L_t
  int max_iters = 100;       // ignored when auto_budget
  bool auto_budget = false;  // K from inner_budget at the requested eps
  bool ascent_check = false; // assert non-decreasing AL value per step
};

/// Euclidean projection onto the probability simplex (sort then threshold).
VectorXd project_simplex(const VectorXd& v);

/// One projected Q-ascent step:
/// pi'(.|s) = Proj_simplex( pi(.|s) + eta * Q_Gamma(s,.) ).
TabularPolicy pqa_step(const TabularCmdp& cmdp, const TabularPolicy& policy,
                       const DualState& dual, double eta);

/// Runs K pqa_step iterations from warm_start; grad_evals = K.
/// eps is consulted only when config.auto_budget or config.auto_eta is set.
std::pair<TabularPolicy, long> solve_subproblem_pqa(const TabularCmdp& cmdp,
                                                    const DualState& dual,
                                                    const TabularPolicy& warm_start,
                                                    const PqaConfig& config,
                                                    double eps = 1.0);

SubproblemOracle make_pqa_oracle(const PqaConfig& config);

}  // namespace cmdpal
