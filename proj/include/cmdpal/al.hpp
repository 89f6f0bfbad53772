#pragma once

#include "cmdpal/cmdp.hpp"

#include <functional>
#include <utility>

namespace cmdpal {

/// Multipliers plus the penalty/tolerance schedule for one outer loop.
struct DualState {
  VectorXd lambda;      // length m
  double beta = 1.0;    // > 0
  int outer_iter = 1;   // t >= 1
  double sigma = 1.0;   // tolerance schedule constant, > 0

  double eps() const { return sigma / (static_cast<double>(outer_iter) * outer_iter); }

  static DualState initial(int m, double beta, double sigma);
  void validate() const;
};

struct AlmTraceRow {
  int iter = 0;
  double eps_t = 0.0;
  VectorXd lambda;      // multipliers used for this subproblem
  double v_r = 0.0;
  VectorXd v_c;
  double al_value = 0.0;
  long inner_grads = 0;
  long cum_grads = 0;
  double gamma_max = 0.0;   // largest pseudo-reward entry seen this iteration
  bool inner_warning = false;
};

struct AlmTrace {
  std::vector<AlmTraceRow> rows;
  std::string to_csv() const;
};

/// Subproblem solver contract: given the model, current duals and target
/// tolerance, return a policy and the number of gradient evaluations spent.
using SubproblemOracle = std::function<std::pair<TabularPolicy, long>(
    const TabularCmdp&, const DualState&, double eps, const TabularPolicy& warm)>;

/// L^beta(pi, lambda) = V_r(rho)
///   + (beta/2) sum_i ( -min{V_ci(rho) - b_i - lambda_i/beta, 0}^2 + lambda_i^2/beta^2 ).
double al_value(const TabularCmdp& cmdp, const TabularPolicy& policy, const DualState& dual);

/// Gamma(pi) = r - beta sum_i c_i * min{V_ci(rho) - b_i - lambda_i/beta, 0}.
/// Q of this pseudo-reward gives the policy gradient of the AL objective.
MatrixXd pseudo_reward(const TabularCmdp& cmdp, const TabularPolicy& policy,
                       const DualState& dual);

/// xi_i = max{V_ci - b_i - lambda_i/beta, 0}.
double slack(double v_c_i, double b_i, double lambda_i, double beta);

/// lambda'_i = lambda_i - (beta/2)(V_ci - b_i - xi_i); increments outer_iter.
/// Takes the margins V_ci - b_i.
DualState dual_update(const DualState& dual, const VectorXd& constraint_margins);

/// Smoothness bound L_t for the AL objective as a function of the policy,
/// scaled by the reward range R = max(|r_lo|, |r_hi|):
///   L_t = iota * (1 + beta sum_i (R/(1-gamma) + |b_i| + lambda_i/beta)) * R
///         + beta m A^2 R^2 / (1-gamma),   iota = 2 gamma A / (1-gamma)^3.
double smoothness_constant(const TabularCmdp& cmdp, const DualState& dual);

/// Upper bound U on the entries of Gamma(pi_t) over a run, from the Slater
/// margins zeta_i > 0:
///   U = R * (1 + beta ||b||_1 + sqrt(m) sqrt(M^2 + beta sigma pi^2/3) + m M),
///   M = 1 / (min_i zeta_i (1-gamma)).
/// Throws if any zeta_i <= 0.
double pseudo_reward_bound(const TabularCmdp& cmdp, const DualState& dual,
                           const VectorXd& zeta);

/// K_t = ceil( 32 L (1 + 1/((1-gamma) rho_min)) / ((1-gamma)^2 rho_min eps) ).
long inner_budget(double smoothness, double eps, double rho_min, double gamma);

enum class BudgetMode { kTheory, kFixed };

struct AlmOptions {
  int outer_iters = 10;     // T
  double beta = 10.0;
  double sigma = 1.0;
  BudgetMode mode = BudgetMode::kFixed;
};

/// Generic inexact AL outer loop: lambda_1 = 0, T rounds of
/// subproblem-solve (to eps_t = sigma/t^2 in theory mode) then dual_update.
/// Returns the last-iterate policy and the full trace.
std::pair<TabularPolicy, AlmTrace> run_alm(const TabularCmdp& cmdp,
                                           const SubproblemOracle& oracle,
                                           const AlmOptions& opts,
                                           const TabularPolicy& init);

std::pair<TabularPolicy, AlmTrace> run_alm(const TabularCmdp& cmdp,
                                           const SubproblemOracle& oracle,
                                           const AlmOptions& opts);

}  // namespace cmdpal
