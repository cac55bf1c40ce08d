#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gridforge/instance.hpp"

namespace gridforge {

struct SolveLimits {
    std::int64_t max_nodes = 2'000'000;
    std::int64_t max_solutions = 1;
    std::size_t max_trace_chars = 8192;
    // Memory guard for trajectories that keep every undone placement.
    std::size_t max_recorded_steps = 200'000;
};

struct Solved {
    Grid grid;
    std::int64_t nodes = 0;
};

struct Unsat {
    std::int64_t nodes = 0;
};

struct BudgetExceeded {
    std::int64_t nodes = 0;
    std::string reason;
};

using SolveResult = std::variant<Solved, Unsat, BudgetExceeded>;

// DFS over placements with one-step elimination. Cells are taken minimum
// remaining values first (ties row-major), values in alphabet order.
// Nodes count placements, so a fully given instance solves in 0 nodes.
SolveResult solve(const PuzzleInstance& instance, const SolveLimits& limits = {});

struct CountResult {
    std::int64_t count = 0;  // saturates at cap
    std::int64_t nodes = 0;
    bool budget_exceeded = false;
};

CountResult count_solutions(const PuzzleInstance& instance, std::int64_t cap,
                            const SolveLimits& limits = {});

struct CellCandidates {
    Coord cell;
    std::vector<int> values;
    bool operator==(const CellCandidates&) const = default;
};

// Sorted the way traces print them: fewest candidates first, then row-major.
using CandidateMap = std::vector<CellCandidates>;

struct Step {
    Coord cell;
    int value = 0;
    int candidate_count_before = 0;
    std::vector<int> alternatives;
    Grid resulting_state;
    CandidateMap candidates_after;
    bool backtracked = false;
    // Index of the step this one extends, -1 for the initial state.
    int parent = -1;
};

struct Trajectory {
    Grid initial_state;
    CandidateMap initial_candidates;
    std::vector<Step> steps;  // DFS order, undone branches included and marked
    Grid final_state;
    std::int64_t nodes = 0;
};

using TraceResult = std::variant<Trajectory, Unsat, BudgetExceeded>;

// As solve, recording every placement. BudgetExceeded also fires when the
// default rendering would be longer than limits.max_trace_chars.
TraceResult solve_with_trace(const PuzzleInstance& instance, const SolveLimits& limits = {});

// Candidate map of every Unknown cell of a state.
CandidateMap candidate_map(const PuzzleInstance& instance, const Grid& state);

// Text form of a trajectory. Without backtracked steps this is the clean
// solving line; with them, "Backtrack to step k" lines mark where an undone
// branch resumes (k = 0 is the initial state).
std::string render_trajectory(const PuzzleInstance& instance, const Trajectory& t,
                              bool include_backtracked = false);

using ojson = nlohmann::ordered_json;

// Structured form of the same trajectory, every step included.
ojson trajectory_to_json(const PuzzleInstance& instance, const Trajectory& t);

struct Valid {};
struct Invalid {
    std::vector<Violation> violations;
};
using ActionVerdict = std::variant<Valid, Invalid>;

// Immediate-violation check of one placement; ignores long-term solvability.
ActionVerdict valid_action(const PuzzleInstance& instance, const Grid& state, Coord cell,
                           std::string_view symbol);

} // namespace gridforge
