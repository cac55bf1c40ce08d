#include "gridforge/instance.hpp"

#include <algorithm>

#include "gridforge/rules.hpp"

namespace gridforge {

std::string_view to_string(Difficulty d) {
    switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
    }
    return "easy";
}

Difficulty parse_difficulty(std::string_view text) {
    if (text == "easy") return Difficulty::Easy;
    if (text == "medium") return Difficulty::Medium;
    if (text == "hard") return Difficulty::Hard;
    throw Error(ErrorCode::InvalidArgument,
                "difficulty must be easy, medium or hard, got '" + std::string(text) + "'");
}

PuzzleInstance::PuzzleInstance(std::string definition_id, int rows, int cols, Structures structures,
                               std::vector<Condition> conditions, std::optional<Grid> solution,
                               std::uint64_t seed, Difficulty difficulty)
    : definition_id_(std::move(definition_id)),
      definition_(&lookup(definition_id_)),
      structures_(std::move(structures)),
      conditions_(std::move(conditions)),
      solution_(std::move(solution)),
      seed_(seed),
      difficulty_(difficulty) {
    definition_->check_size(rows, cols);
    alphabet_ = definition_->alphabet(rows, cols);
    grid_ = Grid(rows, cols);
    constraints_ = definition_->instantiate(rows, cols, structures_);

    for (int i : definition_->blocked_cells(rows, cols, structures_)) grid_.set(i, CellState::blocked());

    condition_mask_.assign(grid_.size(), 0);
    for (const Condition& c : conditions_) {
        const int i = grid_.index(c.cell);
        if (condition_mask_[i]) {
            throw Error(ErrorCode::Schema, "duplicate condition at " + to_string(c.cell));
        }
        if (grid_.at(i).is_blocked()) {
            throw Error(ErrorCode::Schema, "condition on structural cell " + to_string(c.cell));
        }
        const int v = alphabet_.index_of(c.value);
        if (v < 0) {
            throw Error(ErrorCode::Schema, "condition value '" + c.value + "' not in the alphabet");
        }
        condition_mask_[i] = 1;
        grid_.set(i, CellState::assigned(v));
    }

    by_cell_.assign(grid_.size(), {});
    for (std::size_t k = 0; k < constraints_.size(); ++k) {
        for (int i : constraints_[k].scope) by_cell_[i].push_back(static_cast<int>(k));
    }

    if (solution_) {
        if (!solution_->same_shape(grid_)) {
            throw Error(ErrorCode::ShapeMismatch, "solution shape differs from the grid");
        }
        for (int i = 0; i < grid_.size(); ++i) {
            // Blocked cells follow the structures whatever the stored grid says.
            if (grid_.at(i).is_blocked()) solution_->set(i, CellState::blocked());
            else if (solution_->at(i).is_blocked()) solution_->set(i, CellState::unknown());
        }
        if (!is_solved(*this, *solution_)) {
            throw Error(ErrorCode::Schema, "stored solution does not satisfy the instance");
        }
    }
}

int PuzzleInstance::open_cells() const { return grid_.count_unknown(); }

Grid apply_assignment(const Grid& state, Coord cell, int value) {
    const CellState& s = state.at(cell);
    if (!s.is_unknown()) {
        throw Error(ErrorCode::CellNotAssignable,
                    "cell " + to_string(cell) + (s.is_blocked() ? " is structural" : " is already assigned"));
    }
    Grid out = state;
    out.set(cell, CellState::assigned(value));
    return out;
}

Grid apply_assignment(const PuzzleInstance& instance, const Grid& state, Coord cell,
                      std::string_view symbol) {
    if (!state.same_shape(instance.grid())) {
        throw Error(ErrorCode::ShapeMismatch, "state shape differs from the instance grid");
    }
    state.index(cell);  // bounds first
    if (instance.is_condition(cell)) {
        throw Error(ErrorCode::CellNotAssignable, "cell " + to_string(cell) + " holds a given clue");
    }
    const int v = instance.alphabet().index_of(symbol);
    if (v < 0) {
        throw Error(ErrorCode::InvalidArgument, "value '" + std::string(symbol) + "' not in the alphabet");
    }
    return apply_assignment(state, cell, v);
}

namespace {

void require_shape(const PuzzleInstance& instance, const Grid& state) {
    if (!state.same_shape(instance.grid())) {
        throw Error(ErrorCode::ShapeMismatch,
                    "state is " + std::to_string(state.rows()) + "x" + std::to_string(state.cols()) +
                        ", instance is " + std::to_string(instance.rows()) + "x" +
                        std::to_string(instance.cols()));
    }
}

} // namespace

std::vector<Violation> check_constraints(const PuzzleInstance& instance, const Grid& state) {
    require_shape(instance, state);
    std::vector<Violation> out;
    const auto& cs = instance.constraints();
    for (std::size_t k = 0; k < cs.size(); ++k) {
        if (!violated(cs[k], state)) continue;
        Violation v;
        v.constraint = static_cast<int>(k);
        v.label = cs[k].label;
        v.kind = cs[k].kind();
        for (int i : cs[k].scope) v.scope.push_back(state.coord(i));
        for (int i : offending_cells(cs[k], state)) v.offending.push_back(state.coord(i));
        out.push_back(std::move(v));
    }
    return out;
}

bool consistent(const PuzzleInstance& instance, const Grid& state) {
    require_shape(instance, state);
    for (const Constraint& c : instance.constraints()) {
        if (violated(c, state)) return false;
    }
    return true;
}

std::vector<int> candidates(const PuzzleInstance& instance, const Grid& state, Coord cell) {
    require_shape(instance, state);
    const int index = state.index(cell);
    if (!state.at(index).is_unknown()) {
        throw Error(ErrorCode::CellNotAssignable, "cell " + to_string(cell) + " is not empty");
    }
    // Constraints away from the cell are unaffected by the placement.
    const auto& touching = instance.constraints_at(index);
    const auto& cs = instance.constraints();
    for (std::size_t k = 0; k < cs.size(); ++k) {
        if (!std::binary_search(touching.begin(), touching.end(), static_cast<int>(k)) &&
            violated(cs[k], state)) {
            return {};
        }
    }
    std::vector<int> out;
    Grid probe = state;
    for (int v = 0; v < instance.alphabet().size(); ++v) {
        probe.set(index, CellState::assigned(v));
        bool ok = true;
        for (int k : touching) {
            if (dead_end(cs[k], probe)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(v);
    }
    return out;
}

bool is_solved(const PuzzleInstance& instance, const Grid& state) {
    require_shape(instance, state);
    const Grid& initial = instance.grid();
    for (int i = 0; i < state.size(); ++i) {
        const CellState& s = state.at(i);
        if (initial.at(i).is_blocked()) continue;
        if (!s.is_assigned()) return false;
        if (initial.at(i).is_assigned() && initial.at(i) != s) return false;
    }
    return consistent(instance, state);
}

Grid state_from_tokens(const PuzzleInstance& instance,
                       const std::vector<std::vector<std::string>>& tokens) {
    const Grid& initial = instance.grid();
    if (static_cast<int>(tokens.size()) != initial.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "answer has " + std::to_string(tokens.size()) + " rows, expected " +
                                                  std::to_string(initial.rows()));
    }
    Grid out(initial.rows(), initial.cols());
    for (int r = 0; r < initial.rows(); ++r) {
        if (static_cast<int>(tokens[r].size()) != initial.cols()) {
            throw Error(ErrorCode::ShapeMismatch, "answer row " + std::to_string(r) + " has " +
                                                      std::to_string(tokens[r].size()) + " cells, expected " +
                                                      std::to_string(initial.cols()));
        }
        for (int c = 0; c < initial.cols(); ++c) {
            if (initial.at(Coord{r, c}).is_blocked()) {
                out.set(Coord{r, c}, CellState::blocked());
                continue;
            }
            const int v = instance.alphabet().index_of(tokens[r][c]);
            if (v >= 0) out.set(Coord{r, c}, CellState::assigned(v));
        }
    }
    return out;
}

std::vector<std::vector<std::string>> state_tokens(const PuzzleInstance& instance, const Grid& state) {
    return grid_tokens(state, instance.alphabet(), instance.definition().blocked_token);
}

std::vector<std::vector<std::string>> perception_tokens(const PuzzleInstance& instance) {
    auto out = state_tokens(instance, instance.grid());
    const Structures& s = instance.structures();
    if (instance.definition_id() == "hitori") {
        for (int i = 0; i < instance.grid().size(); ++i) {
            out[i / instance.cols()][i % instance.cols()] = std::to_string(s.numbers[i]);
        }
    }
    for (const Revealed& rv : s.revealed) out[rv.cell.row][rv.cell.col] = std::to_string(rv.number);
    return out;
}

} // namespace gridforge
