#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmdpal/envs.hpp"
#include "cmdpal/lp.hpp"
#include "test_util.hpp"

using namespace cmdpal;

TEST_CASE("cliff walk model shape and invariants") {
  const auto [cmdp, geo] = cliff_world();
  CHECK(cmdp.n_states == 21);
  CHECK(cmdp.n_actions == 4);
  CHECK(cmdp.discount == 0.9);
  CHECK(cmdp.num_constraints() == 1);
  CHECK(cmdp.thresholds(0) == -0.17);
  CHECK(cmdp.initial_dist(0) == doctest::Approx(1.0 / 21.0));
  CHECK_NOTHROW(cmdp.validate());

  CHECK(geo.start_cell == 14);
  CHECK(geo.goal_cells == std::vector<int>{20});
  CHECK(geo.cliff_cells == std::vector<int>({15, 16, 17, 18, 19}));
}

TEST_CASE("cliff walk dynamics details") {
  const auto [cmdp, geo] = cliff_world();
  const int A = 4, goal = 20, start = 14;

  // The goal absorbs under every action.
  for (int a = 0; a < A; ++a) CHECK(cmdp.transition(goal * A + a, goal) == 1.0);

  // Cliff states dump the agent back at the start for free.
  for (int cliff : geo.cliff_cells)
    for (int a = 0; a < A; ++a) {
      CHECK(cmdp.transition(cliff * A + a, start) == 1.0);
      CHECK(cmdp.reward(cliff, a) == 0.0);
      CHECK(cmdp.constraint_rewards[0](cliff, a) == 0.0);
    }

  // From the start, moving right enters cliff cell 15 with probability 0.7,
  // which costs -0.7 in expectation and lands back at the start.
  CHECK(cmdp.constraint_rewards[0](start, 3) == doctest::Approx(-0.7));
  CHECK(cmdp.transition(start * A + 3, start) >= 0.7);

  // From cell 13 (just above the goal), moving down enters the goal with
  // probability 0.7. From cell 12, down lands in cliff cell 19 with
  // probability 0.7 and right slips into the cliff with probability 0.1.
  CHECK(cmdp.reward(13, 1) == doctest::Approx(0.7));
  CHECK(cmdp.constraint_rewards[0](12, 1) == doctest::Approx(-0.7));
  CHECK(cmdp.constraint_rewards[0](12, 3) == doctest::Approx(-0.1));
  CHECK(cmdp.reward(12, 3) == doctest::Approx(0.0));

  // Interior cell far from cliff and goal: no reward, no cost.
  CHECK(cmdp.reward.row(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cmdp.constraint_rewards[0].row(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("descent grid model shape and dynamics") {
  const auto [cmdp, geo] = deep_sea_treasure();
  CHECK(cmdp.n_states == 25);
  CHECK(cmdp.n_actions == 2);
  CHECK(cmdp.discount == 0.9);
  CHECK(cmdp.thresholds(0) == -0.1);
  CHECK_NOTHROW(cmdp.validate());
  CHECK(geo.treasure_cells == std::vector<int>{20});
  CHECK(geo.landmine_cells == std::vector<int>({11, 16}));

  // Deterministic moves: exactly one 1 per transition row.
  for (int row = 0; row < cmdp.transition.rows(); ++row) {
    CHECK(cmdp.transition.row(row).maxCoeff() == 1.0);
    CHECK(cmdp.transition.row(row).sum() == doctest::Approx(1.0));
  }

  // Bottom row absorbs.
  for (int c = 0; c < 5; ++c)
    for (int a = 0; a < 2; ++a) CHECK(cmdp.transition((20 + c) * 2 + a, 20 + c) == 1.0);

  // Down-right costs 0.02 everywhere above the bottom row, including when
  // clamped at the right edge.
  for (int s = 0; s < 20; ++s) {
    const int next = (s / 5 + 1) * 5 + std::min(s % 5 + 1, 4);
    const double expected = -0.02 + (next == 20 ? 1.0 : 0.0);
    CHECK(cmdp.reward(s, 1) == doctest::Approx(expected));
  }

  // Entering the treasure from directly above pays +1.
  CHECK(cmdp.reward(15, 0) == doctest::Approx(1.0));
  // Entering either landmine costs -2.
  CHECK(cmdp.constraint_rewards[0](6, 0) == doctest::Approx(-2.0));   // 6 -> 11
  CHECK(cmdp.constraint_rewards[0](10, 1) == doctest::Approx(-2.0));  // 10 -> 16
  CHECK(cmdp.constraint_rewards[0](11, 0) == doctest::Approx(-2.0));  // 11 -> 16
}

TEST_CASE("both environments are strictly feasible with an active constraint") {
  for (const auto& [cmdp, geo] : {cliff_world(), deep_sea_treasure()}) {
    CHECK(slater_margin(cmdp, 0) > 0.0);

    const CmdpLpResult res = solve_occupancy_lp(cmdp);
    CHECK(res.lambda_star(0) > 0.0);

    // Drop the constraint: the unconstrained optimum must violate it,
    // otherwise the constraint would be vacuous.
    TabularCmdp unconstrained = cmdp;
    unconstrained.constraint_rewards.clear();
    unconstrained.thresholds = VectorXd(0);
    const CmdpLpResult free_res = solve_occupancy_lp(unconstrained);
    const TabularPolicy greedy = policy_from_occupancy(free_res.mu_star);
    const double v_c =
        policy_evaluate(cmdp, greedy, cmdp.constraint_rewards[0]).scalar_value;
    CHECK(v_c < cmdp.thresholds(0));
    // And the constraint has a price: the constrained optimum is lower.
    CHECK(res.v_star < free_res.v_star - 1e-6);
  }
}

TEST_CASE("reference solution values") {
  {
    const auto [cmdp, geo] = cliff_world();
    const CmdpLpResult res = solve_occupancy_lp(cmdp);
    CHECK(res.v_star == doctest::Approx(0.3880).epsilon(1e-3));
    CHECK(res.lambda_star(0) == doctest::Approx(0.1203).epsilon(1e-2));
  }
  {
    const auto [cmdp, geo] = deep_sea_treasure();
    const CmdpLpResult res = solve_occupancy_lp(cmdp);
    CHECK(res.v_star == doctest::Approx(0.13609).epsilon(1e-3));
    CHECK(res.lambda_star(0) == doctest::Approx(0.005263).epsilon(1e-2));
  }
}

TEST_CASE("ascii maps render the layouts") {
  const auto cliff = cliff_world().second;
  CHECK(cliff.ascii_map() ==
        ".......\n"
        ".......\n"
        "SCCCCCG\n");

  const auto descent = deep_sea_treasure().second;
  CHECK(descent.ascii_map() ==
        "S....\n"
        ".....\n"
        ".M...\n"
        ".M...\n"
        "T....\n");
}
