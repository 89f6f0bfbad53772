#include "cmdpal/ppqa.hpp"
#include "cmdpal/pqa.hpp"

#include <json.hpp>

#include <cmath>
#include <memory>
#include <stdexcept>

namespace cmdpal {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

}  // namespace

FeatureMap tile_code(const TileCoderConfig& config, int rows, int cols, int n_actions) {
  if (config.table_size < config.num_tilings)
    throw std::invalid_argument("tile_code: table size must be >= number of tilings");
  if (config.num_tilings < 1 || config.tile_size < 1)
    throw std::invalid_argument("tile_code: tilings and tile size must be positive");

  const int n_states = rows * cols;
  FeatureMap map;
  map.phi = MatrixXd::Zero(n_states * n_actions, config.table_size);
  for (int s = 0; s < n_states; ++s) {
    const int r = s / cols, c = s % cols;
    for (int a = 0; a < n_actions; ++a) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(config.table_size);
      for (int tiling = 0; tiling < config.num_tilings; ++tiling) {
        // Each tiling shifts the grid by tiling/num_tilings of a tile edge.
        const int off = tiling * config.tile_size / config.num_tilings;
        const int tr = (r + off) / config.tile_size;
        const int tc = (c + off) / config.tile_size;
        std::uint64_t h = config.seed;
        h = mix(h, static_cast<std::uint64_t>(tiling));
        h = mix(h, static_cast<std::uint64_t>(tr));
        h = mix(h, static_cast<std::uint64_t>(tc));
        h = mix(h, static_cast<std::uint64_t>(a));
        row(static_cast<int>(h % config.table_size)) += 1.0;
      }
      const double norm = row.norm();
      map.phi.row(s * n_actions + a) = row / norm;
    }
  }
  return map;
}

FeatureMap one_hot_features(int n_states, int n_actions) {
  FeatureMap map;
  map.phi = MatrixXd::Identity(n_states * n_actions, n_states * n_actions);
  return map;
}

std::string FeatureMap::to_json() const {
  nlohmann::json j;
  j["rows"] = phi.rows();
  j["dim"] = phi.cols();
  std::vector<double> data;
  data.reserve(phi.size());
  for (int r = 0; r < phi.rows(); ++r)
    for (int c = 0; c < phi.cols(); ++c) data.push_back(phi(r, c));
  j["phi"] = data;
  return j.dump();
}

FeatureMap FeatureMap::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int rows = j.at("rows").get<int>();
  const int dim = j.at("dim").get<int>();
  const auto data = j.at("phi").get<std::vector<double>>();
  if (static_cast<int>(data.size()) != rows * dim)
    throw std::invalid_argument("feature map json: wrong number of entries");
  FeatureMap map;
  map.phi.resize(rows, dim);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < dim; ++c) map.phi(r, c) = data[r * dim + c];
  return map;
}

TabularPolicy log_linear_probs(const LogLinearPolicy& policy) {
  if (!policy.theta.allFinite())
    throw std::invalid_argument("log_linear_probs: theta must be finite");
  const int S = policy.n_states, A = policy.n_actions;
  TabularPolicy out;
  out.probs.resize(S, A);
  for (int s = 0; s < S; ++s) {
    VectorXd logits(A);
    for (int a = 0; a < A; ++a) logits(a) = policy.features.phi.row(s * A + a).dot(policy.theta);
    const VectorXd shifted = (logits.array() - logits.maxCoeff()).exp();
    out.probs.row(s) = (shifted / shifted.sum()).transpose();
  }
  return out;
}

std::pair<double, VectorXd> surrogate_loss_and_grad(const VectorXd& d_weights,
                                                    const TabularPolicy& target,
                                                    const LogLinearPolicy& policy) {
  const int S = policy.n_states, A = policy.n_actions;
  const TabularPolicy probs = log_linear_probs(policy);

  double loss = 0.0;
  VectorXd grad = VectorXd::Zero(policy.features.dim());
  for (int s = 0; s < S; ++s) {
    if (d_weights(s) == 0.0) continue;
    VectorXd logits(A);
    for (int a = 0; a < A; ++a) logits(a) = policy.features.phi.row(s * A + a).dot(policy.theta);
    const double max_logit = logits.maxCoeff();
    const double log_z = max_logit + std::log((logits.array() - max_logit).exp().sum());
    for (int a = 0; a < A; ++a) {
      loss -= d_weights(s) * target.probs(s, a) * (logits(a) - log_z);
      grad += d_weights(s) * (probs.probs(s, a) - target.probs(s, a)) *
              policy.features.phi.row(s * A + a).transpose();
    }
  }
  return {loss, grad};
}

LogLinearPolicy ppqa_update(const TabularCmdp& cmdp, const DualState& dual,
                            const LogLinearPolicy& policy, const PpqaConfig& config,
                            PpqaStepInfo* info) {
  const TabularPolicy tabular = log_linear_probs(policy);
  const TabularPolicy target = pqa_step(cmdp, tabular, dual, config.eta);
  const VectorXd d_weights = occupancy_measure(cmdp, tabular).state_marginal(cmdp.discount);

  LogLinearPolicy next = policy;
  auto [loss0, grad] = surrogate_loss_and_grad(d_weights, target, next);
  double loss = loss0;
  for (int n = 0; n < config.surrogate_steps; ++n) {
    next.theta -= config.surrogate_step * grad;
    std::tie(loss, grad) = surrogate_loss_and_grad(d_weights, target, next);
  }
  if (info) {
    info->loss_initial = loss0;
    info->loss_final = loss;
    info->diverged = loss > loss0 + 1e-12;
  }
  return next;
}

std::pair<TabularPolicy, long> solve_subproblem_ppqa(const TabularCmdp& cmdp,
                                                     const DualState& dual,
                                                     LogLinearPolicy& policy,
                                                     const PpqaConfig& config) {
  for (int k = 0; k < config.max_iters; ++k) policy = ppqa_update(cmdp, dual, policy, config);
  return {log_linear_probs(policy), config.max_iters};
}

SubproblemOracle make_ppqa_oracle(const FeatureMap& features, const PpqaConfig& config) {
  auto state = std::make_shared<LogLinearPolicy>();
  state->features = features;
  return [state, config](const TabularCmdp& cmdp, const DualState& dual, double /*eps*/,
                         const TabularPolicy& /*warm*/) {
    if (state->theta.size() == 0) {
      state->theta = VectorXd::Zero(state->features.dim());
      state->n_states = cmdp.n_states;
      state->n_actions = cmdp.n_actions;
    }
    return solve_subproblem_ppqa(cmdp, dual, *state, config);
  };
}

}  // namespace cmdpal
