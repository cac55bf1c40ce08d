#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridforge/grid.hpp"

namespace gridforge {

// The closed set of reusable rule primitives. Every registered puzzle is
// compiled to constraints of these kinds only.
enum class ConstraintKind {
    AllDifferent,
    LineSum,
    WeightedLineSum,
    LineCount,
    RunLengths,
    MaxRunLength,
    NoTouch,
    AdjacencyCount,
    ParityMask,
    InequalityEdge,
    ConsecutiveEdge,
    Visibility,
    Illumination,
    GravityFill,
    Bijection,
    Connectivity,
    FleetComposition,
    NeighborMineCount,
    AdjacentNotEqual,
};

inline constexpr int kConstraintKindCount = 19;

std::string_view to_string(ConstraintKind kind);

enum class Neighborhood { Orthogonal, IncludingDiagonal, DiagonalOnly };

// Parameter blocks, one per kind. Symbol fields are alphabet indices; numeric
// cell values are index + 1.
namespace params {

// Assigned values in scope are pairwise distinct. With `keys` set, the
// distinctness applies to keys[i] of the scope cells holding `active`
// (Hitori: numbers of unshaded cells).
struct AllDifferent {
    std::vector<int> keys;
    int active = -1;
};
struct LineSum {
    int target = 0;
    int min_value = 1;
    int max_value = 1;
};
// Sum of weights[i] over scope cells holding `symbol` equals target.
struct WeightedLineSum {
    std::vector<int> weights;
    int symbol = 0;
    int target = 0;
};
struct LineCount {
    int symbol = 0;
    int target = 0;
};
// Scope is a line in reading order; maximal blocks of `symbol` have these lengths.
struct RunLengths {
    std::vector<int> runs;
    int symbol = 0;
};
struct MaxRunLength {
    int limit = 2;
};
// No two cells holding `symbol` are neighbours under `hood`.
struct NoTouch {
    Neighborhood hood = Neighborhood::Orthogonal;
    int symbol = 0;
};
// Scope: the orthogonal neighbours of `center`; exactly `target` hold `symbol`.
struct AdjacencyCount {
    int center = 0;
    int symbol = 0;
    int target = 0;
};
struct ParityMask {
    bool even = false;
};
// value(scope[0]) < value(scope[1]).
struct InequalityEdge {
    int min_value = 1;
    int max_value = 1;
};
// |value(scope[0]) - value(scope[1])| == 1 iff consecutive.
struct ConsecutiveEdge {
    bool consecutive = false;
};
// Scope in viewing order; the number of prefix maxima equals target.
struct Visibility {
    int target = 0;
    int max_value = 1;
};
// Scope: all non-blocked cells. Bulbs light their row and column up to a
// blocked cell; bulbs never light each other; a full state is fully lit.
struct Illumination {
    int symbol = 0;
};
// A cell holding `symbol` at rank r forces every scope cell with rank <= r
// to hold `symbol` (water from the bottom, mercury from the bulb).
struct GravityFill {
    std::vector<int> ranks;
    int symbol = 0;
};
// Scope: candidate tent cells. Tents and `trees` admit a perfect matching
// along orthogonal adjacency.
struct Bijection {
    std::vector<int> trees;
    int symbol = 0;
};
// Scope cells not holding `shaded` form one orthogonally connected component.
struct Connectivity {
    int shaded = 0;
};
// Orthogonal components of `symbol` are straight ships whose lengths form
// exactly the multiset `ships`.
struct FleetComposition {
    std::vector<int> ships;
    int symbol = 0;
};
// Scope: the 8-neighbourhood of `center`; exactly `target` hold `symbol`.
struct NeighborMineCount {
    int center = 0;
    int symbol = 0;
    int target = 0;
};
struct AdjacentNotEqual {};

} // namespace params

// Alternative order matches ConstraintKind.
using ConstraintParams =
    std::variant<params::AllDifferent, params::LineSum, params::WeightedLineSum, params::LineCount,
                 params::RunLengths, params::MaxRunLength, params::NoTouch,
                 params::AdjacencyCount, params::ParityMask, params::InequalityEdge,
                 params::ConsecutiveEdge, params::Visibility, params::Illumination,
                 params::GravityFill, params::Bijection, params::Connectivity,
                 params::FleetComposition, params::NeighborMineCount, params::AdjacentNotEqual>;

struct Constraint {
    std::string label;
    std::vector<int> scope;
    ConstraintParams params;

    ConstraintKind kind() const { return static_cast<ConstraintKind>(params.index()); }

    template <typename P>
    const P& as() const {
        return std::get<P>(params);
    }
};

// Immediate violation: a breach decidable from the assigned cells alone. On a
// state with no unknown scope cell this is exactly "the constraint fails".
bool violated(const Constraint& constraint, const Grid& state);

// violated() plus further sound infeasibility tests (no completion of the
// scope can satisfy the constraint). Used by search for pruning only.
bool dead_end(const Constraint& constraint, const Grid& state);

// Cells blamed for a violation; empty when the constraint is not violated.
std::vector<int> offending_cells(const Constraint& constraint, const Grid& state);

// Cells of `grid` adjacent to `index` under `hood`, in row-major order.
std::vector<int> neighbours(const Grid& grid, int index, Neighborhood hood);

} // namespace gridforge
