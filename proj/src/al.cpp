#include "cmdpal/al.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cmdpal {

DualState DualState::initial(int m, double beta, double sigma) {
  DualState d;
  d.lambda = VectorXd::Zero(m);
  d.beta = beta;
  d.sigma = sigma;
  d.outer_iter = 1;
  d.validate();
  return d;
}

void DualState::validate() const {
  if (beta <= 0.0) throw std::invalid_argument("dual state: beta must be positive");
  if (sigma <= 0.0) throw std::invalid_argument("dual state: sigma must be positive");
  if (outer_iter < 1) throw std::invalid_argument("dual state: outer_iter must be >= 1");
}

namespace {

// min{V_ci - b_i - lambda_i/beta, 0} per constraint.
VectorXd penalty_terms(const VectorXd& v_c, const VectorXd& b, const DualState& dual) {
  return (v_c - b - dual.lambda / dual.beta).cwiseMin(0.0);
}

VectorXd constraint_values(const TabularCmdp& cmdp, const TabularPolicy& policy) {
  VectorXd v_c(cmdp.num_constraints());
  for (int i = 0; i < cmdp.num_constraints(); ++i)
    v_c(i) = policy_evaluate(cmdp, policy, cmdp.constraint_rewards[i]).scalar_value;
  return v_c;
}

}  // namespace

double al_value(const TabularCmdp& cmdp, const TabularPolicy& policy,
                const DualState& dual) {
  const double v_r = policy_evaluate(cmdp, policy).scalar_value;
  const VectorXd v_c = constraint_values(cmdp, policy);
  const VectorXd neg = penalty_terms(v_c, cmdp.thresholds, dual);
  const double penalty =
      (-neg.array().square() + dual.lambda.array().square() / (dual.beta * dual.beta)).sum();
  return v_r + 0.5 * dual.beta * penalty;
}

MatrixXd pseudo_reward(const TabularCmdp& cmdp, const TabularPolicy& policy,
                       const DualState& dual) {
  const VectorXd v_c = constraint_values(cmdp, policy);
  const VectorXd neg = penalty_terms(v_c, cmdp.thresholds, dual);
  MatrixXd gamma = cmdp.reward;
  for (int i = 0; i < cmdp.num_constraints(); ++i)
    gamma -= dual.beta * neg(i) * cmdp.constraint_rewards[i];
  return gamma;
}

double slack(double v_c_i, double b_i, double lambda_i, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("slack: beta must be positive");
  return std::max(v_c_i - b_i - lambda_i / beta, 0.0);
}

DualState dual_update(const DualState& dual, const VectorXd& constraint_vals) {
  if (constraint_vals.size() != dual.lambda.size())
    throw std::invalid_argument("dual_update: constraint-value length mismatch");
  DualState next = dual;
  for (int i = 0; i < dual.lambda.size(); ++i) {
    const double xi = slack(constraint_vals(i), 0.0, dual.lambda(i), dual.beta);
    next.lambda(i) = dual.lambda(i) - 0.5 * dual.beta * (constraint_vals(i) - xi);
  }
  ++next.outer_iter;
  return next;
}

double smoothness_constant(const TabularCmdp& cmdp, const DualState& dual) {
  const double gamma = cmdp.discount;
  const double A = cmdp.n_actions;
  const double R = cmdp.reward_range();
  const double horizon = 1.0 / (1.0 - gamma);
  const double iota = 2.0 * gamma * A * horizon * horizon * horizon;
  double lambda_sum = 0.0;
  for (int i = 0; i < cmdp.num_constraints(); ++i)
    lambda_sum += R * horizon + std::abs(cmdp.thresholds(i)) + dual.lambda(i) / dual.beta;
  return iota * (1.0 + dual.beta * lambda_sum) * R +
         dual.beta * cmdp.num_constraints() * A * A * R * R * horizon;
}

double pseudo_reward_bound(const TabularCmdp& cmdp, const DualState& dual,
                           const VectorXd& zeta) {
  const int m = cmdp.num_constraints();
  if (zeta.size() != m) throw std::invalid_argument("pseudo_reward_bound: zeta length mismatch");
  if (m > 0 && zeta.minCoeff() <= 0.0)
    throw std::invalid_argument("pseudo_reward_bound: nonpositive Slater margin");
  if (m == 0) return cmdp.reward_range();
  const double M = 1.0 / (zeta.minCoeff() * (1.0 - cmdp.discount));
  const double b_norm = cmdp.thresholds.cwiseAbs().sum();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double mid = std::sqrt(static_cast<double>(m)) *
                     std::sqrt(M * M + dual.beta * dual.sigma * pi2 / 3.0);
  return cmdp.reward_range() * (1.0 + dual.beta * b_norm + mid + m * M);
}

long inner_budget(double smoothness, double eps, double rho_min, double gamma) {
  if (smoothness <= 0.0 || eps <= 0.0 || rho_min <= 0.0)
    throw std::invalid_argument("inner_budget: arguments must be positive");
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("inner_budget: gamma must lie in [0,1)");
  const double one_minus = 1.0 - gamma;
  const double k = 32.0 * smoothness * (1.0 + 1.0 / (one_minus * rho_min)) /
                   (one_minus * one_minus * rho_min * eps);
  return static_cast<long>(std::ceil(k));
}

std::string AlmTrace::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  const int m = rows.empty() ? 0 : static_cast<int>(rows.front().lambda.size());
  out << "iter,eps_t";
  for (int i = 0; i < m; ++i) out << ",lambda_" << i;
  out << ",v_r";
  for (int i = 0; i < m; ++i) out << ",v_c_" << i;
  out << ",al_value,inner_grads,cum_grads\n";
  for (const auto& row : rows) {
    out << row.iter << ',' << row.eps_t;
    for (int i = 0; i < m; ++i) out << ',' << row.lambda(i);
    out << ',' << row.v_r;
    for (int i = 0; i < m; ++i) out << ',' << row.v_c(i);
    out << ',' << row.al_value << ',' << row.inner_grads << ',' << row.cum_grads << '\n';
  }
  return out.str();
}

std::pair<TabularPolicy, AlmTrace> run_alm(const TabularCmdp& cmdp,
                                           const SubproblemOracle& oracle,
                                           const AlmOptions& opts,
                                           const TabularPolicy& init) {
  if (opts.outer_iters < 1) throw std::invalid_argument("run_alm: need at least one iteration");
  cmdp.validate();

  DualState dual = DualState::initial(cmdp.num_constraints(), opts.beta, opts.sigma);
  TabularPolicy policy = init;
  AlmTrace trace;
  long cum_grads = 0;

  for (int t = 1; t <= opts.outer_iters; ++t) {
    const double eps_t = opts.sigma / (static_cast<double>(t) * t);
    auto [next_policy, grads] = oracle(cmdp, dual, eps_t, policy);
    next_policy.validate();
    policy = next_policy;
    cum_grads += grads;

    AlmTraceRow row;
    row.iter = t;
    row.eps_t = eps_t;
    row.lambda = dual.lambda;
    row.v_r = policy_evaluate(cmdp, policy).scalar_value;
    row.v_c.resize(cmdp.num_constraints());
    for (int i = 0; i < cmdp.num_constraints(); ++i)
      row.v_c(i) = policy_evaluate(cmdp, policy, cmdp.constraint_rewards[i]).scalar_value;
    row.al_value = al_value(cmdp, policy, dual);
    row.inner_grads = grads;
    row.cum_grads = cum_grads;
    row.gamma_max = pseudo_reward(cmdp, policy, dual).maxCoeff();
    trace.rows.push_back(std::move(row));

    dual = dual_update(dual, trace.rows.back().v_c - cmdp.thresholds);
  }
  return {policy, trace};
}

std::pair<TabularPolicy, AlmTrace> run_alm(const TabularCmdp& cmdp,
                                           const SubproblemOracle& oracle,
                                           const AlmOptions& opts) {
  return run_alm(cmdp, oracle, opts, TabularPolicy::uniform(cmdp.n_states, cmdp.n_actions));
}

}  // namespace cmdpal
