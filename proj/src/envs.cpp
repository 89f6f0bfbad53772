#include "cmdpal/envs.hpp"

#include <algorithm>
#include <sstream>

namespace cmdpal {

namespace {

bool contains(const std::vector<int>& cells, int cell) {
  return std::find(cells.begin(), cells.end(), cell) != cells.end();
}

}  // namespace

std::string GridGeometry::ascii_map() const {
  std::ostringstream out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int cell = r * cols + c;
      char glyph = '.';
      if (contains(cliff_cells, cell)) glyph = 'C';
      if (contains(landmine_cells, cell)) glyph = 'M';
      if (contains(treasure_cells, cell)) glyph = 'T';
      if (contains(goal_cells, cell)) glyph = 'G';
      if (cell == start_cell) glyph = 'S';
      out << glyph;
    }
    out << '\n';
  }
  return out.str();
}

std::pair<TabularCmdp, GridGeometry> cliff_world() {
  GridGeometry geo;
  geo.rows = 3;
  geo.cols = 7;
  geo.start_cell = 2 * 7 + 0;
  geo.goal_cells = {2 * 7 + 6};
  for (int c = 1; c <= 5; ++c) geo.cliff_cells.push_back(2 * 7 + c);

  const int S = geo.rows * geo.cols;
  const int A = 4;  // up, down, left, right
  const int goal = geo.goal_cells[0];
  // Movement is slippery: the intended direction fires with probability 0.7,
  // each of the other three with probability 0.1. This makes walking the row
  // directly above the cliff genuinely risky, so the cost constraint binds
  // at the reward-optimal policy.
  const double kSlip = 0.1;

  TabularCmdp cmdp;
  cmdp.n_states = S;
  cmdp.n_actions = A;
  cmdp.discount = 0.9;
  cmdp.initial_dist = VectorXd::Constant(S, 1.0 / S);
  cmdp.reward = MatrixXd::Zero(S, A);
  cmdp.constraint_rewards = {MatrixXd::Zero(S, A)};
  cmdp.thresholds = VectorXd::Constant(1, -0.17);
  cmdp.reward_lo = -1.0;
  cmdp.reward_hi = 1.0;
  cmdp.transition = MatrixXd::Zero(S * A, S);

  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int s = 0; s < S; ++s) {
    const int r = s / geo.cols, c = s % geo.cols;
    for (int a = 0; a < A; ++a) {
      const int row_index = s * A + a;
      if (s == goal) {
        cmdp.transition(row_index, s) = 1.0;
        continue;
      }
      if (contains(geo.cliff_cells, s)) {
        // A fallen agent is returned to the start; the cost was already paid
        // on the transition in.
        cmdp.transition(row_index, geo.start_cell) = 1.0;
        continue;
      }
      for (int dir = 0; dir < 4; ++dir) {
        const double p = (dir == a) ? 1.0 - 3.0 * kSlip : kSlip;
        int nr = r + dr[dir], nc = c + dc[dir];
        if (nr < 0 || nr >= geo.rows || nc < 0 || nc >= geo.cols) {
          nr = r;
          nc = c;
        }
        int next = nr * geo.cols + nc;
        if (contains(geo.cliff_cells, next)) {
          cmdp.constraint_rewards[0](s, a) += p * -1.0;
          next = geo.start_cell;
        } else if (next == goal && s != goal) {
          cmdp.reward(s, a) += p * 1.0;
        }
        cmdp.transition(row_index, next) += p;
      }
    }
  }
  cmdp.validate();
  return {cmdp, geo};
}

std::pair<TabularCmdp, GridGeometry> deep_sea_treasure() {
  GridGeometry geo;
  geo.rows = 5;
  geo.cols = 5;
  geo.start_cell = 0;
  geo.treasure_cells = {4 * 5 + 0};
  geo.landmine_cells = {2 * 5 + 1, 3 * 5 + 1};

  const int S = geo.rows * geo.cols;
  const int A = 2;  // 0: down, 1: down-right
  const int treasure = geo.treasure_cells[0];

  TabularCmdp cmdp;
  cmdp.n_states = S;
  cmdp.n_actions = A;
  cmdp.discount = 0.9;
  cmdp.initial_dist = VectorXd::Constant(S, 1.0 / S);
  cmdp.reward = MatrixXd::Zero(S, A);
  cmdp.constraint_rewards = {MatrixXd::Zero(S, A)};
  cmdp.thresholds = VectorXd::Constant(1, -0.1);
  cmdp.reward_lo = -2.0;
  cmdp.reward_hi = 1.0;
  cmdp.transition = MatrixXd::Zero(S * A, S);

  for (int s = 0; s < S; ++s) {
    const int r = s / geo.cols, c = s % geo.cols;
    for (int a = 0; a < A; ++a) {
      const int row_index = s * A + a;
      if (r == geo.rows - 1) {
        cmdp.transition(row_index, s) = 1.0;
        continue;
      }
      const int nr = r + 1;
      const int nc = std::min(c + a, geo.cols - 1);
      const int next = nr * geo.cols + nc;
      if (a == 1) cmdp.reward(s, a) += -0.02;
      if (next == treasure) cmdp.reward(s, a) += 1.0;
      if (contains(geo.landmine_cells, next)) cmdp.constraint_rewards[0](s, a) += -2.0;
      cmdp.transition(row_index, next) = 1.0;
    }
  }
  cmdp.validate();
  return {cmdp, geo};
}

}  // namespace cmdpal
