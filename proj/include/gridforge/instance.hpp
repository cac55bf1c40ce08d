#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridforge/constraint.hpp"
#include "gridforge/grid.hpp"

namespace gridforge {

struct PuzzleDefinition;

enum class Difficulty { Easy, Medium, Hard };

std::string_view to_string(Difficulty d);
Difficulty parse_difficulty(std::string_view text);

struct Cage {
    std::vector<Coord> cells;
    int target = 0;
    bool operator==(const Cage&) const = default;
};

// Futoshiki: value(a) < value(b). Renzoku: a dot between a and b.
struct Edge {
    Coord a;
    Coord b;
    bool operator==(const Edge&) const = default;
};

// Light-up wall; number -1 when unnumbered.
struct Wall {
    Coord cell;
    int number = -1;
    bool operator==(const Wall&) const = default;
};

// A revealed field-explore count.
struct Revealed {
    Coord cell;
    int number = 0;
    bool operator==(const Revealed&) const = default;
};

// Structural clue bundle. Each puzzle uses the fields named in its schema and
// leaves the rest empty.
struct Structures {
    std::vector<int> regions;  // row-major region / color-group id per cell
    std::vector<Cage> cages;
    std::vector<int> row_clues;
    std::vector<int> col_clues;
    std::vector<int> top, bottom, left, right;  // skyscraper sight counts
    std::vector<std::vector<int>> row_runs;
    std::vector<std::vector<int>> col_runs;
    std::vector<Edge> inequalities;
    std::vector<Edge> dots;
    std::vector<int> parity;  // per cell: 1 even, 0 odd
    std::vector<std::vector<Coord>> thermometers;  // bulb first
    std::vector<Coord> trees;
    std::vector<Wall> walls;
    std::vector<int> fleet;
    std::vector<Revealed> revealed;
    std::vector<int> numbers;  // hitori printed numbers, row-major

    bool operator==(const Structures&) const = default;
};

struct Condition {
    Coord cell;
    std::string value;
    bool operator==(const Condition&) const = default;
};

struct Violation {
    int constraint = 0;
    std::string label;
    ConstraintKind kind = ConstraintKind::AllDifferent;
    std::vector<Coord> scope;
    std::vector<Coord> offending;
};

// One playable puzzle. Immutable after construction; the constructor compiles
// the definition's constraints for this size and structure bundle and checks
// conditions and the optional solution against them.
class PuzzleInstance {
public:
    PuzzleInstance(std::string definition_id, int rows, int cols, Structures structures,
                   std::vector<Condition> conditions, std::optional<Grid> solution,
                   std::uint64_t seed, Difficulty difficulty);

    const std::string& definition_id() const { return definition_id_; }
    const PuzzleDefinition& definition() const { return *definition_; }
    int rows() const { return grid_.rows(); }
    int cols() const { return grid_.cols(); }
    const Alphabet& alphabet() const { return alphabet_; }
    const Structures& structures() const { return structures_; }
    const std::vector<Condition>& conditions() const { return conditions_; }
    const std::optional<Grid>& solution() const { return solution_; }
    std::uint64_t seed() const { return seed_; }
    Difficulty difficulty() const { return difficulty_; }

    // Initial state: blocked cells and conditions placed, everything else Unknown.
    const Grid& grid() const { return grid_; }

    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<int>& constraints_at(int cell) const { return by_cell_[cell]; }
    bool is_condition(Coord c) const { return condition_mask_[grid_.index(c)] != 0; }

    // Number of cells a solver must fill (not blocked, not a condition).
    int open_cells() const;

private:
    std::string definition_id_;
    const PuzzleDefinition* definition_;
    Alphabet alphabet_;
    Structures structures_;
    std::vector<Condition> conditions_;
    std::optional<Grid> solution_;
    std::uint64_t seed_;
    Difficulty difficulty_;
    Grid grid_;
    std::vector<Constraint> constraints_;
    std::vector<std::vector<int>> by_cell_;
    std::vector<char> condition_mask_;
};

// Value-semantics placement. Throws OutOfBounds or CellNotAssignable.
Grid apply_assignment(const Grid& state, Coord cell, int value);
Grid apply_assignment(const PuzzleInstance& instance, const Grid& state, Coord cell,
                      std::string_view symbol);

std::vector<Violation> check_constraints(const PuzzleInstance& instance, const Grid& state);

// Same verdict as check_constraints(...).empty() without building the list.
bool consistent(const PuzzleInstance& instance, const Grid& state);

// Values (alphabet indices) whose placement at `cell` leaves every touching
// constraint violation free and not provably dead. Throws CellNotAssignable
// unless the cell is Unknown.
std::vector<int> candidates(const PuzzleInstance& instance, const Grid& state, Coord cell);

bool is_solved(const PuzzleInstance& instance, const Grid& state);

// Parse a token matrix (answer grid) into a state. Blocked cells are taken
// from the instance whatever the token. Unrecognised tokens leave the cell
// Unknown. Throws ShapeMismatch when dimensions differ.
Grid state_from_tokens(const PuzzleInstance& instance,
                       const std::vector<std::vector<std::string>>& tokens);

// Token matrix of a state, "*" for unknown and the puzzle's display token
// for blocked cells.
std::vector<std::vector<std::string>> state_tokens(const PuzzleInstance& instance,
                                                   const Grid& state);

// What the board shows before solving, as a token matrix: conditions, "*"
// for open cells, display tokens for structural cells, printed numbers for
// hitori cells and revealed field-explore counts. This is the perception
// ground truth.
std::vector<std::vector<std::string>> perception_tokens(const PuzzleInstance& instance);

} // namespace gridforge
