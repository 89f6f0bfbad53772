#pragma once

#include "cmdpal/cmdp.hpp"

#include <random>

namespace cmdpal::testutil {

using Rng = std::mt19937_64;

inline VectorXd random_dist(int n, Rng& rng, double floor = 0.01) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v / v.sum();
}

inline MatrixXd random_table(int rows, int cols, Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
  return m;
}

inline TabularCmdp random_cmdp(int S, int A, int m, double gamma, Rng& rng) {
  TabularCmdp cmdp;
  cmdp.n_states = S;
  cmdp.n_actions = A;
  cmdp.discount = gamma;
  cmdp.transition.resize(S * A, S);
  for (int row = 0; row < S * A; ++row)
    cmdp.transition.row(row) = random_dist(S, rng).transpose();
  cmdp.reward = random_table(S, A, rng);
  for (int i = 0; i < m; ++i) cmdp.constraint_rewards.push_back(random_table(S, A, rng));
  cmdp.thresholds.resize(m);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  // Thresholds well below the value floor keep random instances feasible.
  for (int i = 0; i < m; ++i) cmdp.thresholds(i) = u(rng);
  cmdp.initial_dist = random_dist(S, rng);
  cmdp.reward_lo = 0.0;
  cmdp.reward_hi = 1.0;
  cmdp.validate();
  return cmdp;
}

inline TabularPolicy random_policy(int S, int A, Rng& rng) {
  TabularPolicy p;
  p.probs.resize(S, A);
  for (int s = 0; s < S; ++s) p.probs.row(s) = random_dist(A, rng, 0.05).transpose();
  return p;
}

}  // namespace cmdpal::testutil
