#pragma once

#include "cmdpal/cmdp.hpp"

namespace cmdpal {

/// Grid layout shared by both benchmark environments; states are row-major,
/// state = row * cols + col.
struct GridGeometry {
  int rows = 0;
  int cols = 0;
  int start_cell = -1;
  std::vector<int> cliff_cells;
  std::vector<int> goal_cells;
  std::vector<int> landmine_cells;
  std::vector<int> treasure_cells;

  std::string ascii_map() const;
};

/// 3x7 cliff walk: 21 states, 4 actions (up/down/left/right), gamma = 0.9,
/// one constraint with threshold -0.17, uniform initial distribution.
/// Stepping into a cliff cell costs -1 and teleports to the start; entering
/// the goal pays +1 and absorbs; off-grid moves are no-ops.
std::pair<TabularCmdp, GridGeometry> cliff_world();

/// 5x5 descent grid: 25 states, 2 actions (down, down-right), gamma = 0.9,
/// one constraint with threshold -0.1, uniform initial distribution.
/// Down-right pays -0.02; entering the treasure cell pays +1; entering a
/// landmine cell costs -2; the bottom row absorbs.
std::pair<TabularCmdp, GridGeometry> deep_sea_treasure();

}  // namespace cmdpal
