#include "cmdpal/cmdp.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace cmdpal {

namespace {

constexpr double kStochasticTol = 1e-12;

void check(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// P_pi(s, s') = sum_a pi(a|s) P(s'|s,a)
MatrixXd policy_transition(const TabularCmdp& cmdp, const TabularPolicy& policy) {
  const int S = cmdp.n_states, A = cmdp.n_actions;
  MatrixXd p_pi = MatrixXd::Zero(S, S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      p_pi.row(s) += policy.probs(s, a) * cmdp.transition.row(s * A + a);
  return p_pi;
}

}  // namespace

void TabularCmdp::validate() const {
  check(n_states > 0 && n_actions > 0, "cmdp: state/action counts must be positive");
  check(discount >= 0.0 && discount < 1.0, "cmdp: discount must lie in [0,1)");
  check(transition.rows() == n_states * n_actions && transition.cols() == n_states,
        "cmdp: transition table has wrong shape");
  check(reward.rows() == n_states && reward.cols() == n_actions,
        "cmdp: reward table has wrong shape");
  check(initial_dist.size() == n_states, "cmdp: initial distribution has wrong length");
  check(thresholds.size() == num_constraints(), "cmdp: threshold count mismatch");

  for (int row = 0; row < transition.rows(); ++row) {
    check(transition.row(row).minCoeff() >= 0.0, "cmdp: negative transition probability");
    check(std::abs(transition.row(row).sum() - 1.0) <= kStochasticTol,
          "cmdp: transition row does not sum to 1");
  }
  check(initial_dist.minCoeff() >= 0.0, "cmdp: negative initial probability");
  check(std::abs(initial_dist.sum() - 1.0) <= kStochasticTol,
        "cmdp: initial distribution does not sum to 1");

  auto in_range = [&](const MatrixXd& table) {
    return table.minCoeff() >= reward_lo - kStochasticTol &&
           table.maxCoeff() <= reward_hi + kStochasticTol;
  };
  check(reward_lo <= reward_hi, "cmdp: empty reward range");
  check(in_range(reward), "cmdp: reward outside declared range");
  for (const auto& c : constraint_rewards) {
    check(c.rows() == n_states && c.cols() == n_actions, "cmdp: constraint table has wrong shape");
    check(in_range(c), "cmdp: constraint reward outside declared range");
  }
}

TabularPolicy TabularPolicy::uniform(int n_states, int n_actions) {
  TabularPolicy p;
  p.probs = MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions);
  return p;
}

void TabularPolicy::validate() const {
  for (int s = 0; s < probs.rows(); ++s) {
    if (probs.row(s).minCoeff() < 0.0 || std::abs(probs.row(s).sum() - 1.0) > kStochasticTol)
      throw std::invalid_argument("policy: row " + std::to_string(s) + " is not on the simplex");
  }
}

VectorXd OccupancyMeasure::state_marginal(double gamma) const {
  return (1.0 - gamma) * mu.rowwise().sum();
}

ValuePair policy_evaluate(const TabularCmdp& cmdp, const TabularPolicy& policy,
                          const MatrixXd& pseudo_reward) {
  if (cmdp.discount >= 1.0) throw std::invalid_argument("policy_evaluate: discount must be < 1");
  if (!pseudo_reward.allFinite())
    throw std::invalid_argument("policy_evaluate: pseudo-reward must be finite");
  const int S = cmdp.n_states, A = cmdp.n_actions;

  const MatrixXd p_pi = policy_transition(cmdp, policy);
  const VectorXd u_pi = (policy.probs.array() * pseudo_reward.array()).rowwise().sum();

  ValuePair out;
  const MatrixXd system = MatrixXd::Identity(S, S) - cmdp.discount * p_pi;
  out.v = system.partialPivLu().solve(u_pi);
  out.q.resize(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      out.q(s, a) = pseudo_reward(s, a) + cmdp.discount * cmdp.transition.row(s * A + a).dot(out.v);
  out.scalar_value = cmdp.initial_dist.dot(out.v);
  return out;
}

OccupancyMeasure occupancy_measure(const TabularCmdp& cmdp, const TabularPolicy& policy) {
  const int S = cmdp.n_states, A = cmdp.n_actions;
  const MatrixXd p_pi = policy_transition(cmdp, policy);
  // Discounted visitation: w^T = rho^T (I - gamma P_pi)^{-1}
  const MatrixXd system = MatrixXd::Identity(S, S) - cmdp.discount * p_pi.transpose();
  const VectorXd w = system.partialPivLu().solve(cmdp.initial_dist);

  OccupancyMeasure out;
  out.mu.resize(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      out.mu(s, a) = w(s) * policy.probs(s, a);
  return out;
}

TabularPolicy policy_from_occupancy(const OccupancyMeasure& occ) {
  const int S = static_cast<int>(occ.mu.rows());
  const int A = static_cast<int>(occ.mu.cols());
  TabularPolicy out;
  out.probs.resize(S, A);
  for (int s = 0; s < S; ++s) {
    const double mass = occ.mu.row(s).sum();
    if (mass > 1e-12)
      out.probs.row(s) = occ.mu.row(s) / mass;
    else
      out.probs.row(s).setConstant(1.0 / A);
  }
  return out;
}

std::string cmdp_to_json(const TabularCmdp& cmdp) {
  nlohmann::json j;
  j["n_states"] = cmdp.n_states;
  j["n_actions"] = cmdp.n_actions;
  j["gamma"] = cmdp.discount;
  j["rho"] = std::vector<double>(cmdp.initial_dist.data(),
                                 cmdp.initial_dist.data() + cmdp.initial_dist.size());
  j["reward_lo"] = cmdp.reward_lo;
  j["reward_hi"] = cmdp.reward_hi;

  auto flatten = [](const MatrixXd& table) {
    std::vector<double> out;
    out.reserve(table.size());
    for (int r = 0; r < table.rows(); ++r)
      for (int c = 0; c < table.cols(); ++c) out.push_back(table(r, c));
    return out;
  };
  j["rewards"] = flatten(cmdp.reward);
  j["constraints"] = nlohmann::json::array();
  for (int i = 0; i < cmdp.num_constraints(); ++i) {
    j["constraints"].push_back({{"values", flatten(cmdp.constraint_rewards[i])},
                                {"threshold", cmdp.thresholds(i)}});
  }
  j["transition"] = flatten(cmdp.transition);
  return j.dump(2);
}

TabularCmdp cmdp_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TabularCmdp cmdp;
  cmdp.n_states = j.at("n_states").get<int>();
  cmdp.n_actions = j.at("n_actions").get<int>();
  cmdp.discount = j.at("gamma").get<double>();
  cmdp.reward_lo = j.value("reward_lo", 0.0);
  cmdp.reward_hi = j.value("reward_hi", 1.0);

  const auto rho = j.at("rho").get<std::vector<double>>();
  cmdp.initial_dist = Eigen::Map<const VectorXd>(rho.data(), rho.size());

  auto unflatten = [](const std::vector<double>& data, int rows, int cols) {
    if (static_cast<int>(data.size()) != rows * cols)
      throw std::invalid_argument("cmdp json: table has wrong number of entries");
    MatrixXd out(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out(r, c) = data[r * cols + c];
    return out;
  };
  const int S = cmdp.n_states, A = cmdp.n_actions;
  cmdp.reward = unflatten(j.at("rewards").get<std::vector<double>>(), S, A);
  for (const auto& jc : j.at("constraints")) {
    cmdp.constraint_rewards.push_back(unflatten(jc.at("values").get<std::vector<double>>(), S, A));
  }
  cmdp.thresholds.resize(cmdp.num_constraints());
  for (int i = 0; i < cmdp.num_constraints(); ++i)
    cmdp.thresholds(i) = j.at("constraints")[i].at("threshold").get<double>();
  cmdp.transition = unflatten(j.at("transition").get<std::vector<double>>(), S * A, S);
  cmdp.validate();
  return cmdp;
}

}  // namespace cmdpal
