#pragma once

// Worked 4x4 Sudoku examples and the responses written about them.

#include <string>
#include <vector>

#include "gridforge/instance.hpp"

namespace fixtures {

using Board = std::vector<std::vector<std::string>>;

// Conditions are every non-"*" token of `board`.
inline gridforge::PuzzleInstance from_board(const std::string& id, const Board& board,
                                            gridforge::Structures s = {}) {
    std::vector<gridforge::Condition> conds;
    for (int r = 0; r < static_cast<int>(board.size()); ++r) {
        for (int c = 0; c < static_cast<int>(board[r].size()); ++c) {
            if (board[r][c] != "*") conds.push_back({{r, c}, board[r][c]});
        }
    }
    return gridforge::PuzzleInstance(id, static_cast<int>(board.size()), static_cast<int>(board[0].size()),
                                     std::move(s), std::move(conds), std::nullopt, 0, gridforge::Difficulty::Easy);
}

inline const Board kSuccessStart = {{"3", "*", "*", "2"}, {"*", "*", "*", "*"}, {"*", "*", "*", "*"}, {"*", "2", "3", "*"}};
inline const Board kSuccessSolution = {{"3", "1", "4", "2"}, {"2", "4", "1", "3"}, {"1", "3", "2", "4"}, {"4", "2", "3", "1"}};
inline const Board kFailureStart = {{"*", "*", "4", "1"}, {"*", "*", "*", "*"}, {"*", "*", "*", "3"}, {"*", "1", "*", "*"}};
inline const Board kFailureAnswer = {{"2", "3", "4", "1"}, {"4", "4", "1", "2"}, {"4", "2", "1", "3"}, {"3", "1", "2", "4"}};
inline const Board kRlStart = {{"2", "4", "*", "1"}, {"3", "*", "2", "4"}, {"*", "*", "1", "2"}, {"1", "2", "4", "*"}};

inline const std::string kStep1 =
    "Step 1: Placing 1 at (0, 1). This cell had 2 possible values (4 were alternatives)";
inline const std::string kStep2 = "Step 2: Placing 4 at (0, 2). This cell had 1 possible values";

inline const std::string kBeforeRl = R"(<think>
First, let's look at the first row and first column. The only number that can go in the top left cell is 1, since it's the only number not already present in the top row or column.
Now let's look at the top row. The number 1 is already in the top left cell, so the only possible numbers for the remaining cells are 2 and 3. Since 2 is already in the second column, the number 2 must go in the top middle cell, and the number 3 must go in the top right cell.
So the final solution is:
[[1, 2, 3, 4], [2, *, 4, 1], [3, 4, 1, *], [4, *, 2, 3]]
</think>
<answer>
[[1, 2, 3, 4], [2, *, 4, 1], [3, 4, 1, *], [4, *, 2, 3]]
</answer>)";

inline const std::string kAfterRl = R"(<perception>
[[2, 4, *, 1], [3, *, 2, 4], [*, *, 1, 2], [1, 2, 4, *]]
</perception>
<think>
Since the numbers are 1 to 4, and the goal is to fill in the missing numbers without repeating any number in each row, column, and 2x2 subgrid, we can start by filling in the numbers one by one.
For the first row, we know that the numbers 2, 4, and 1 have already been used, so the only number that can go in the last square is 3.
So, the filled-in board looks like this:
[[2, 4, 3, 1], [3, 1, 2, 4], [4, 3, 1, 2], [1, 2, 4, 3]]
</think>
<answer>
[[2, 4, 3, 1], [3, 1, 2, 4], [4, 3, 1, 2], [1, 2, 4, 3]]
</answer>)";

// Fenced block whose values are grids written as strings.
inline const std::string kFailureOutput =
    "```json{\n\"Initial State\": \"[[*, *, 4, 1], [*, *, *, *], [*, *, *, 3], [*, 1, *, *]]\",  \"Thought\": "
    "\"Initial State:[[*, *, 4, 1], [*, *, *, *], [*, *, *, 3], [*, 1, *, *]]}Initial possible numbers for empty "
    "cells:Cell (1, 3): 2Cell (3, 2): 2\", \"Solution\": \"[[2, 3, 4, 1], [4, 4, 1, 2], [4, 2, 1, 3], [3, 1, 2, 4]]\"}```";

} // namespace fixtures
