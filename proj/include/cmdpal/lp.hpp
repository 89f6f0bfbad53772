#pragma once

#include "cmdpal/cmdp.hpp"

namespace cmdpal {

/// max objective . x  subject to  eq_A x = eq_b, x >= 0.
struct StandardLp {
  VectorXd objective;
  MatrixXd eq_A;
  VectorXd eq_b;

  std::string to_text() const;
};

struct LpSolution {
  VectorXd x;
  double value = 0.0;
  VectorXd row_duals;  // y with B^T y = c_B at the optimal basis
};

/// Occupancy-measure LP: variables (mu, z), S Bellman flow equalities,
/// m slack rows <mu, c_i> - z_i = b_i, objective max <mu, r>.
StandardLp build_occupancy_lp(const TabularCmdp& cmdp);

/// Dense revised simplex, Bland's rule, two phases. Deterministic.
/// Throws std::runtime_error naming a violated row when infeasible.
LpSolution solve_lp(const StandardLp& lp);

struct CmdpLpResult {
  OccupancyMeasure mu_star;
  double v_star = 0.0;
  VectorXd lambda_star;  // >= 0, multipliers of <mu, c_i> >= b_i
  VectorXd flow_duals;
};

CmdpLpResult solve_occupancy_lp(const TabularCmdp& cmdp);

/// zeta_i = max_pi V_ci(rho) - b_i via value iteration (to 1e-10) plus an
/// exact evaluation of the greedy policy.
double slater_margin(const TabularCmdp& cmdp, int constraint_index);

}  // namespace cmdpal
