#include "gridforge/solver.hpp"

#include <algorithm>
#include <bit>

#include "gridforge/rules.hpp"

namespace gridforge {

namespace {

enum class Mode { First, Count, Trace };

class Search {
public:
    Search(const PuzzleInstance& instance, const SolveLimits& limits, Mode mode, std::int64_t cap)
        : inst_(instance), limits_(limits), mode_(mode), cap_(cap), grid_(instance.grid()) {}

    // Returns false when the initial state is already contradictory.
    bool run() {
        if (!consistent(inst_, grid_)) return false;
        for (const Constraint& c : inst_.constraints()) {
            if (dead_end(c, grid_)) return false;
        }
        build_peers();
        masks_.assign(grid_.size(), 0);
        for (int i = 0; i < grid_.size(); ++i) {
            if (grid_.at(i).is_unknown()) masks_[i] = local_mask(i);
        }
        descend(-1);
        return true;
    }

    std::int64_t nodes() const { return nodes_; }
    std::int64_t found() const { return found_; }
    bool over_budget() const { return over_budget_; }
    const std::string& reason() const { return reason_; }
    const Grid& solution() const { return solution_; }
    Trajectory& trajectory() { return trajectory_; }

private:
    // Cells whose candidates can change when a given cell is placed: the
    // union of the scopes of the constraints through it.
    void build_peers() {
        const auto& cs = inst_.constraints();
        peers_.assign(grid_.size(), {});
        std::vector<int> stamp(grid_.size(), -1);
        for (int i = 0; i < grid_.size(); ++i) {
            for (int k : inst_.constraints_at(i)) {
                for (int j : cs[k].scope) {
                    if (j != i && stamp[j] != i) {
                        stamp[j] = i;
                        peers_[i].push_back(j);
                    }
                }
            }
            std::sort(peers_[i].begin(), peers_[i].end());
        }
    }

    std::uint32_t local_mask(int index) {
        std::uint32_t mask = 0;
        const auto& cs = inst_.constraints();
        const auto& touching = inst_.constraints_at(index);
        for (int v = 0; v < inst_.alphabet().size(); ++v) {
            grid_.set(index, CellState::assigned(v));
            bool ok = true;
            for (int k : touching) {
                if (dead_end(cs[k], grid_)) {
                    ok = false;
                    break;
                }
            }
            if (ok) mask |= 1u << v;
        }
        grid_.set(index, CellState::unknown());
        return mask;
    }

    static std::vector<int> values_of(std::uint32_t mask) {
        std::vector<int> out;
        for (int v = 0; mask; ++v, mask >>= 1) {
            if (mask & 1u) out.push_back(v);
        }
        return out;
    }

    bool dead_after(int index) {
        const auto& cs = inst_.constraints();
        for (int k : inst_.constraints_at(index)) {
            if (dead_end(cs[k], grid_)) return true;
        }
        return false;
    }

    // Candidate lists of all Unknown cells in print order.
    CandidateMap full_map() const {
        CandidateMap map;
        for (int i = 0; i < grid_.size(); ++i) {
            if (grid_.at(i).is_unknown()) map.push_back({grid_.coord(i), values_of(masks_[i])});
        }
        std::stable_sort(map.begin(), map.end(), [](const CellCandidates& a, const CellCandidates& b) {
            return a.values.size() < b.values.size();
        });
        return map;
    }

    CandidateMap& map_slot(int parent) {
        return parent < 0 ? trajectory_.initial_candidates : trajectory_.steps[parent].candidates_after;
    }

    // Fewest candidates, first in row-major order; -1 when nothing is open.
    int pick(int& count) const {
        int best = -1;
        count = 0;
        for (int i = 0; i < grid_.size(); ++i) {
            if (!grid_.at(i).is_unknown()) continue;
            const int n = std::popcount(masks_[i]);
            if (best < 0 || n < count) {
                best = i;
                count = n;
                if (n == 0) break;
            }
        }
        return best;
    }

    // Refreshes the peers of a placed cell. False when one of them is left
    // without candidates.
    bool refresh(int index, std::vector<std::pair<int, std::uint32_t>>& saved) {
        bool alive = true;
        for (int j : peers_[index]) {
            if (!grid_.at(j).is_unknown()) continue;
            saved.push_back({j, masks_[j]});
            masks_[j] = local_mask(j);
            if (masks_[j] == 0) alive = false;
        }
        return alive;
    }

    // True when the whole search should stop.
    bool descend(int parent) {
        const bool tracing = mode_ == Mode::Trace;
        if (tracing) map_slot(parent) = full_map();
        int count = 0;
        const int index = pick(count);
        if (index < 0) {
            ++found_;
            if (found_ == 1) solution_ = grid_;
            return mode_ != Mode::Count || found_ >= cap_;
        }
        if (count == 0) return false;
        const std::vector<int> values = values_of(masks_[index]);
        const Coord cell = grid_.coord(index);
        std::vector<std::pair<int, std::uint32_t>> saved;
        for (int v : values) {
            if (++nodes_ > limits_.max_nodes) {
                over_budget_ = true;
                reason_ = "search exceeded " + std::to_string(limits_.max_nodes) + " nodes";
                return true;
            }
            grid_.set(index, CellState::assigned(v));
            int id = -1;
            if (tracing) {
                if (trajectory_.steps.size() >= limits_.max_recorded_steps) {
                    over_budget_ = true;
                    reason_ = "trajectory exceeded " + std::to_string(limits_.max_recorded_steps) + " steps";
                    return true;
                }
                Step step;
                step.cell = cell;
                step.value = v;
                step.candidate_count_before = static_cast<int>(values.size());
                for (int alt : values) {
                    if (alt != v) step.alternatives.push_back(alt);
                }
                step.resulting_state = grid_;
                step.parent = parent;
                trajectory_.steps.push_back(std::move(step));
                id = static_cast<int>(trajectory_.steps.size()) - 1;
            }
            saved.clear();
            const bool alive = refresh(index, saved) && !dead_after(index);
            if (!alive) {
                if (tracing) trajectory_.steps[id].candidates_after = full_map();
            } else if (descend(id)) {
                return true;
            }
            for (auto it = saved.rbegin(); it != saved.rend(); ++it) masks_[it->first] = it->second;
            grid_.set(index, CellState::unknown());
            if (tracing) {
                for (std::size_t s = id; s < trajectory_.steps.size(); ++s) trajectory_.steps[s].backtracked = true;
            }
        }
        return false;
    }

    const PuzzleInstance& inst_;
    const SolveLimits& limits_;
    Mode mode_;
    std::int64_t cap_;
    Grid grid_;
    Grid solution_;
    std::vector<std::vector<int>> peers_;
    std::vector<std::uint32_t> masks_;
    std::int64_t nodes_ = 0;
    std::int64_t found_ = 0;
    bool over_budget_ = false;
    std::string reason_;
    Trajectory trajectory_;
};

std::string value_list(const Alphabet& alphabet, const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += alphabet.symbol(values[i]);
    }
    return out;
}

void render_map(std::string& out, const Alphabet& alphabet, const CandidateMap& map) {
    for (const auto& cc : map) {
        out += "Cell " + to_string(cc.cell) + ":";
        if (!cc.values.empty()) out += " " + value_list(alphabet, cc.values);
        out += '\n';
    }
}

} // namespace

SolveResult solve(const PuzzleInstance& instance, const SolveLimits& limits) {
    Search search(instance, limits, Mode::First, 1);
    if (!search.run()) return Unsat{0};
    if (search.over_budget()) return BudgetExceeded{search.nodes(), search.reason()};
    if (search.found() == 0) return Unsat{search.nodes()};
    return Solved{search.solution(), search.nodes()};
}

CountResult count_solutions(const PuzzleInstance& instance, std::int64_t cap, const SolveLimits& limits) {
    if (cap < 1) throw Error(ErrorCode::InvalidArgument, "solution cap must be at least 1");
    Search search(instance, limits, Mode::Count, cap);
    if (!search.run()) return {0, 0, false};
    return {std::min(search.found(), cap), search.nodes(), search.over_budget()};
}

CandidateMap candidate_map(const PuzzleInstance& instance, const Grid& state) {
    CandidateMap map;
    for (int i = 0; i < state.size(); ++i) {
        if (!state.at(i).is_unknown()) continue;
        map.push_back({state.coord(i), candidates(instance, state, state.coord(i))});
    }
    std::stable_sort(map.begin(), map.end(), [](const CellCandidates& a, const CellCandidates& b) {
        return a.values.size() < b.values.size();
    });
    return map;
}

TraceResult solve_with_trace(const PuzzleInstance& instance, const SolveLimits& limits) {
    Search search(instance, limits, Mode::Trace, 1);
    if (!search.run()) return Unsat{0};
    if (search.over_budget()) return BudgetExceeded{search.nodes(), search.reason()};
    if (search.found() == 0) return Unsat{search.nodes()};
    Trajectory t = std::move(search.trajectory());
    t.initial_state = instance.grid();
    t.final_state = search.solution();
    t.nodes = search.nodes();
    const std::size_t chars = render_trajectory(instance, t).size();
    if (chars > limits.max_trace_chars) {
        return BudgetExceeded{t.nodes, "trace of " + std::to_string(chars) + " chars exceeds " +
                                           std::to_string(limits.max_trace_chars)};
    }
    return t;
}

std::string render_trajectory(const PuzzleInstance& instance, const Trajectory& t, bool include_backtracked) {
    const Alphabet& alphabet = instance.alphabet();
    const std::string& blocked = instance.definition().blocked_token;
    std::string out = "Initial State: " + format_grid(t.initial_state, alphabet, blocked) + "\n";
    if (!t.initial_candidates.empty()) {
        out += "Initial possible numbers for empty cells:\n";
        render_map(out, alphabet, t.initial_candidates);
    }
    std::vector<int> printed(t.steps.size(), 0);
    int number = 0;
    int last = -1;
    for (std::size_t s = 0; s < t.steps.size(); ++s) {
        const Step& step = t.steps[s];
        if (step.backtracked && !include_backtracked) continue;
        if (include_backtracked && step.parent != last) {
            out += "Backtrack to step " + std::to_string(step.parent < 0 ? 0 : printed[step.parent]) + "\n";
        }
        printed[s] = ++number;
        last = static_cast<int>(s);
        out += "Step " + std::to_string(number) + ": Placing " + alphabet.symbol(step.value) + " at " +
               to_string(step.cell) + ". This cell had " + std::to_string(step.candidate_count_before) +
               " possible values";
        if (!step.alternatives.empty()) out += " (" + value_list(alphabet, step.alternatives) + " were alternatives)";
        out += "\nResulting State: " + format_grid(step.resulting_state, alphabet, blocked) + "\n";
        if (!step.candidates_after.empty()) {
            out += "Possible numbers for remaining empty cells:\n";
            render_map(out, alphabet, step.candidates_after);
        }
    }
    out += "Solution: " + format_grid(t.final_state, alphabet, blocked);
    return out;
}

ojson trajectory_to_json(const PuzzleInstance& instance, const Trajectory& t) {
    const Alphabet& alphabet = instance.alphabet();
    const std::string& blocked = instance.definition().blocked_token;
    auto cands = [&](const CandidateMap& m) {
        ojson arr = ojson::array();
        for (const CellCandidates& cc : m) {
            ojson vals = ojson::array();
            for (int v : cc.values) vals.push_back(alphabet.symbol(v));
            arr.push_back({{"cell", {cc.cell.row, cc.cell.col}}, {"values", vals}});
        }
        return arr;
    };
    ojson steps = ojson::array();
    for (const Step& s : t.steps) {
        ojson alts = ojson::array();
        for (int v : s.alternatives) alts.push_back(alphabet.symbol(v));
        steps.push_back({{"cell", {s.cell.row, s.cell.col}},
                         {"value", alphabet.symbol(s.value)},
                         {"candidate_count", s.candidate_count_before},
                         {"alternatives", alts},
                         {"resulting_state", grid_tokens(s.resulting_state, alphabet, blocked)},
                         {"candidates_after", cands(s.candidates_after)},
                         {"backtracked", s.backtracked},
                         {"parent", s.parent}});
    }
    return {{"initial_state", grid_tokens(t.initial_state, alphabet, blocked)},
            {"initial_candidates", cands(t.initial_candidates)},
            {"steps", steps},
            {"final_state", grid_tokens(t.final_state, alphabet, blocked)},
            {"nodes", t.nodes}};
}

ActionVerdict valid_action(const PuzzleInstance& instance, const Grid& state, Coord cell, std::string_view symbol) {
    Grid next = apply_assignment(instance, state, cell, symbol);
    auto violations = check_constraints(instance, next);
    if (violations.empty()) return Valid{};
    return Invalid{std::move(violations)};
}

} // namespace gridforge
