#include "cmdpal/pqa.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace cmdpal {

VectorXd project_simplex(const VectorXd& v) {
  if (!v.allFinite()) throw std::invalid_argument("project_simplex: input must be finite");
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());

  double cumsum = 0.0;
  double tau = 0.0;
  for (int k = 0; k < n; ++k) {
    cumsum += u[k];
    const double candidate = (cumsum - 1.0) / (k + 1);
    if (u[k] - candidate > 0.0) tau = candidate;
  }
  return (v.array() - tau).cwiseMax(0.0);
}

TabularPolicy pqa_step(const TabularCmdp& cmdp, const TabularPolicy& policy,
                       const DualState& dual, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("pqa_step: eta must be positive");
  const MatrixXd gamma = pseudo_reward(cmdp, policy, dual);
  const ValuePair values = policy_evaluate(cmdp, policy, gamma);

  TabularPolicy next;
  next.probs.resize(cmdp.n_states, cmdp.n_actions);
  for (int s = 0; s < cmdp.n_states; ++s) {
    const VectorXd target = policy.probs.row(s).transpose() + eta * values.q.row(s).transpose();
    next.probs.row(s) = project_simplex(target).transpose();
  }
  return next;
}

std::pair<TabularPolicy, long> solve_subproblem_pqa(const TabularCmdp& cmdp,
                                                    const DualState& dual,
                                                    const TabularPolicy& warm_start,
                                                    const PqaConfig& config,
                                                    double eps) {
  const double smoothness =
      (config.auto_eta || config.auto_budget) ? smoothness_constant(cmdp, dual) : 0.0;
  const double eta = config.auto_eta ? cmdp.rho_min() / smoothness : config.eta;
  const long iters = config.auto_budget
                         ? inner_budget(smoothness, eps, cmdp.rho_min(), cmdp.discount)
                         : config.max_iters;

  TabularPolicy policy = warm_start;
  double previous = config.ascent_check ? al_value(cmdp, policy, dual) : 0.0;
  for (long k = 0; k < iters; ++k) {
    policy = pqa_step(cmdp, policy, dual, eta);
    if (config.ascent_check) {
      const double current = al_value(cmdp, policy, dual);
      if (current < previous - 1e-10)
        throw std::runtime_error("pqa: AL value decreased under the theory step size");
      previous = current;
    }
  }
  return {policy, iters};
}

SubproblemOracle make_pqa_oracle(const PqaConfig& config) {
  return [config](const TabularCmdp& cmdp, const DualState& dual, double eps,
                  const TabularPolicy& warm) {
    return solve_subproblem_pqa(cmdp, dual, warm, config, eps);
  };
}

}  // namespace cmdpal
