#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmdpal/ppqa.hpp"
#include "cmdpal/pqa.hpp"
#include "test_util.hpp"

using namespace cmdpal;
using testutil::Rng;

namespace {

LogLinearPolicy make_policy(const FeatureMap& features, int S, int A) {
  LogLinearPolicy p;
  p.features = features;
  p.theta = VectorXd::Zero(features.dim());
  p.n_states = S;
  p.n_actions = A;
  return p;
}

}  // namespace

TEST_CASE("tile coder: published configurations load and are normalized") {
  for (auto [d, n, s] : {std::tuple{40, 4, 1}, {60, 4, 3}, {80, 6, 5}}) {
    TileCoderConfig config;
    config.table_size = d;
    config.num_tilings = n;
    config.tile_size = s;
    const FeatureMap map = tile_code(config, 3, 7, 4);
    CHECK(map.dim() == d);
    for (int row = 0; row < map.phi.rows(); ++row)
      CHECK(map.phi.row(row).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tile coder is deterministic for a fixed seed") {
  TileCoderConfig config;
  config.table_size = 60;
  config.num_tilings = 4;
  config.tile_size = 3;
  const FeatureMap a = tile_code(config, 3, 7, 4);
  const FeatureMap b = tile_code(config, 3, 7, 4);
  CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  config.seed += 1;
  const FeatureMap c = tile_code(config, 3, 7, 4);
  CHECK((a.phi - c.phi).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("one-hot features are the identity") {
  const FeatureMap map = one_hot_features(3, 2);
  CHECK(map.dim() == 6);
  CHECK((map.phi - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("feature map json round trip") {
  TileCoderConfig config;
  config.table_size = 40;
  const FeatureMap a = tile_code(config, 3, 7, 4);
  const FeatureMap b = FeatureMap::from_json(a.to_json());
  CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("zero parameters give the uniform policy") {
  const FeatureMap map = one_hot_features(4, 3);
  const TabularPolicy pi = log_linear_probs(make_policy(map, 4, 3));
  CHECK((pi.probs.array() - 1.0 / 3.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("softmax is invariant to per-state constant logit shifts") {
  Rng rng(139);
  // Features identical across actions contribute a common logit shift.
  FeatureMap map;
  map.phi = MatrixXd::Zero(2 * 2, 3);
  map.phi << 1, 0, 0.5,  // (s0,a0)
      0, 1, 0.5,         // (s0,a1)
      1, 0, 0.5,         // (s1,a0)
      0, 1, 0.5;         // (s1,a1)
  LogLinearPolicy p = make_policy(map, 2, 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 3; ++i) p.theta(i) = u(rng);
  const TabularPolicy before = log_linear_probs(p);
  p.theta(2) += 10.0;  // moves only the shared coordinate
  const TabularPolicy after = log_linear_probs(p);
  CHECK((before.probs - after.probs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inverse softmax with one-hot features recovers a target policy") {
  Rng rng(149);
  const int S = 3, A = 4;
  const TabularPolicy target = testutil::random_policy(S, A, rng);
  LogLinearPolicy p = make_policy(one_hot_features(S, A), S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) p.theta(s * A + a) = std::log(target.probs(s, a)) + 0.37;
  const TabularPolicy recovered = log_linear_probs(p);
  CHECK((recovered.probs - target.probs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("surrogate gradient vanishes at the target with one-hot features") {
  Rng rng(151);
  const int S = 3, A = 2;
  const TabularPolicy target = testutil::random_policy(S, A, rng);
  LogLinearPolicy p = make_policy(one_hot_features(S, A), S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) p.theta(s * A + a) = std::log(target.probs(s, a));
  const VectorXd d = testutil::random_dist(S, rng);
  auto [loss, grad] = surrogate_loss_and_grad(d, target, p);
  CHECK(grad.cwiseAbs().maxCoeff() < 1e-12);

  double entropy = 0.0;
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      entropy -= d(s) * target.probs(s, a) * std::log(target.probs(s, a));
  CHECK(loss == doctest::Approx(entropy).epsilon(1e-12));
}

TEST_CASE("surrogate gradient matches central finite differences") {
  Rng rng(157);
  const int S = 4, A = 3;
  TileCoderConfig config;
  config.table_size = 10;
  config.num_tilings = 3;
  config.tile_size = 2;
  const FeatureMap map = tile_code(config, 2, 2, A);
  LogLinearPolicy p = make_policy(map, S, A);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < p.theta.size(); ++i) p.theta(i) = u(rng);
  const TabularPolicy target = testutil::random_policy(S, A, rng);
  const VectorXd d = testutil::random_dist(S, rng);

  auto [loss, grad] = surrogate_loss_and_grad(d, target, p);
  const double h = 1e-5;
  for (int i = 0; i < p.theta.size(); ++i) {
    LogLinearPolicy up = p, down = p;
    up.theta(i) += h;
    down.theta(i) -= h;
    const double fd = (surrogate_loss_and_grad(d, target, up).first -
                       surrogate_loss_and_grad(d, target, down).first) /
                      (2 * h);
    CHECK(std::abs(fd - grad(i)) < 1e-6);
  }
}

TEST_CASE("surrogate is midpoint convex and 1-smooth") {
  Rng rng(163);
  const int S = 3, A = 3;
  const FeatureMap map = one_hot_features(S, A);
  const TabularPolicy target = testutil::random_policy(S, A, rng);
  const VectorXd d = testutil::random_dist(S, rng);
  std::uniform_real_distribution<double> u(-2.0, 2.0);

  for (int trial = 0; trial < 50; ++trial) {
    LogLinearPolicy p1 = make_policy(map, S, A), p2 = make_policy(map, S, A);
    for (int i = 0; i < p1.theta.size(); ++i) {
      p1.theta(i) = u(rng);
      p2.theta(i) = u(rng);
    }
    LogLinearPolicy mid = p1;
    mid.theta = 0.5 * (p1.theta + p2.theta);
    const double l1 = surrogate_loss_and_grad(d, target, p1).first;
    const double l2 = surrogate_loss_and_grad(d, target, p2).first;
    const double lm = surrogate_loss_and_grad(d, target, mid).first;
    CHECK(lm <= 0.5 * (l1 + l2) + 1e-10);

    const VectorXd g1 = surrogate_loss_and_grad(d, target, p1).second;
    const VectorXd g2 = surrogate_loss_and_grad(d, target, p2).second;
    CHECK((g1 - g2).norm() <= (p1.theta - p2.theta).norm() + 1e-12);
  }
}

TEST_CASE("ppqa update with zero surrogate steps keeps theta") {
  Rng rng(167);
  const TabularCmdp cmdp = testutil::random_cmdp(3, 2, 1, 0.6, rng);
  LogLinearPolicy p = make_policy(one_hot_features(3, 2), 3, 2);
  PpqaConfig config;
  config.surrogate_steps = 0;
  const DualState dual = DualState::initial(1, 1.0, 1.0);
  const LogLinearPolicy next = ppqa_update(cmdp, dual, p, config);
  CHECK((next.theta - p.theta).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("surrogate loss decreases monotonically with unit step size") {
  Rng rng(173);
  const TabularCmdp cmdp = testutil::random_cmdp(3, 2, 1, 0.6, rng);
  const FeatureMap map = one_hot_features(3, 2);
  LogLinearPolicy p = make_policy(map, 3, 2);
  const TabularPolicy tabular = log_linear_probs(p);
  const DualState dual = DualState::initial(1, 1.0, 1.0);
  const TabularPolicy target = pqa_step(cmdp, tabular, dual, 0.5);
  const VectorXd d = occupancy_measure(cmdp, tabular).state_marginal(cmdp.discount);

  double prev = surrogate_loss_and_grad(d, target, p).first;
  for (int n = 0; n < 200; ++n) {
    p.theta -= 1.0 * surrogate_loss_and_grad(d, target, p).second;
    const double loss = surrogate_loss_and_grad(d, target, p).first;
    CHECK(loss <= prev + 1e-12);
    prev = loss;
  }
}

TEST_CASE("one-hot ppqa update tracks the tabular pqa step") {
  Rng rng(179);
  TabularCmdp cmdp = testutil::random_cmdp(2, 2, 1, 0.5, rng);
  cmdp.initial_dist = VectorXd::Constant(2, 0.5);
  const DualState dual = DualState::initial(1, 1.0, 1.0);

  LogLinearPolicy p = make_policy(one_hot_features(2, 2), 2, 2);
  PpqaConfig config;
  config.eta = 0.02;  // small step keeps the target in the simplex interior
  config.surrogate_steps = 4000;
  config.surrogate_step = 1.0;
  PpqaStepInfo info;
  const LogLinearPolicy next = ppqa_update(cmdp, dual, p, config, &info);
  CHECK_FALSE(info.diverged);
  CHECK(info.loss_final <= info.loss_initial);

  const TabularPolicy target = pqa_step(cmdp, log_linear_probs(p), dual, config.eta);
  const TabularPolicy fitted = log_linear_probs(next);
  for (int s = 0; s < 2; ++s) {
    const double tv = 0.5 * (fitted.probs.row(s) - target.probs.row(s)).cwiseAbs().sum();
    CHECK(tv < 1e-4);
  }
}

TEST_CASE("ppqa oracle runs inside the outer loop with tile features") {
  Rng rng(181);
  const TabularCmdp cmdp = testutil::random_cmdp(6, 2, 1, 0.7, rng);
  TileCoderConfig tile;
  tile.table_size = 12;
  tile.num_tilings = 3;
  tile.tile_size = 2;
  const FeatureMap map = tile_code(tile, 2, 3, 2);
  PpqaConfig config;
  config.eta = 0.5;
  config.surrogate_steps = 30;
  config.max_iters = 10;
  AlmOptions opts;
  opts.outer_iters = 3;
  opts.beta = 2.0;
  auto [policy, trace] = run_alm(cmdp, make_ppqa_oracle(map, config), opts);
  CHECK(trace.rows.size() == 3);
  CHECK_NOTHROW(policy.validate());
}
