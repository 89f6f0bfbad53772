#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cmdpal {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Full model of a discounted constrained MDP: transitions, reward,
/// m constraint rewards with thresholds, discount and initial distribution.
/// Immutable after construction; validate() is called by the factory helpers.
struct TabularCmdp {
  int n_states = 0;
  int n_actions = 0;
  MatrixXd transition;                    // (S*A) x S, row (s*A + a) is P(.|s,a)
  MatrixXd reward;                        // S x A
  std::vector<MatrixXd> constraint_rewards;  // m tables, each S x A
  VectorXd thresholds;                    // b, length m
  double discount = 0.0;                  // gamma in [0,1)
  VectorXd initial_dist;                  // rho, length S
  double reward_lo = 0.0;                 // bounds containing r and every c_i
  double reward_hi = 1.0;

  int num_constraints() const { return static_cast<int>(constraint_rewards.size()); }
  double reward_range() const { return std::max(std::abs(reward_lo), std::abs(reward_hi)); }
  double rho_min() const { return initial_dist.minCoeff(); }

  // Throws std::invalid_argument on any invariant violation.
  void validate() const;
};

/// Row-stochastic state -> action table; the primal variable.
struct TabularPolicy {
  MatrixXd probs;  // S x A, rows on the simplex

  static TabularPolicy uniform(int n_states, int n_actions);
  void validate() const;
};

/// Exact evaluation output: V, Q and the scalar V(rho).
struct ValuePair {
  VectorXd v;        // length S
  MatrixXd q;        // S x A
  double scalar_value = 0.0;  // V(rho)
};

/// Unnormalized state-action visitation mu(s,a); total mass 1/(1-gamma).
struct OccupancyMeasure {
  MatrixXd mu;  // S x A

  // Normalized state marginal d(s) = (1-gamma) * sum_a mu(s,a); sums to 1.
  VectorXd state_marginal(double gamma) const;
  double total_mass() const { return mu.sum(); }
};

/// Exact policy evaluation for an arbitrary pseudo-reward via the dense
/// linear system (I - gamma P_pi) V = u_pi. No iterative truncation.
ValuePair policy_evaluate(const TabularCmdp& cmdp, const TabularPolicy& policy,
                          const MatrixXd& pseudo_reward);

inline ValuePair policy_evaluate(const TabularCmdp& cmdp, const TabularPolicy& policy) {
  return policy_evaluate(cmdp, policy, cmdp.reward);
}

/// mu(s,a) = [rho^T (I - gamma P_pi)^{-1}](s) * pi(a|s).
OccupancyMeasure occupancy_measure(const TabularCmdp& cmdp, const TabularPolicy& policy);

/// pi(a|s) = mu(s,a) / sum_a' mu(s,a'); uniform row where the marginal
/// is below 1e-12.
TabularPolicy policy_from_occupancy(const OccupancyMeasure& mu);

// JSON serialization per the documented schema. Loader validates all
// invariants and rejects on violation.
std::string cmdp_to_json(const TabularCmdp& cmdp);
TabularCmdp cmdp_from_json(const std::string& text);

}  // namespace cmdpal
