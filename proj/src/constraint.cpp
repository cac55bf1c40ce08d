#include "gridforge/constraint.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>

namespace gridforge {

namespace {

int numeric(const CellState& s) { return s.value() + 1; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Count of scope cells holding `symbol` and of unknown scope cells.
struct Tally {
    int hits = 0;
    int unknown = 0;
};

Tally tally(const std::vector<int>& scope, const Grid& g, int symbol) {
    Tally t;
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (s.is_unknown()) {
            ++t.unknown;
        } else if (s.holds(symbol)) {
            ++t.hits;
        }
    }
    return t;
}

bool count_breached(const Tally& t, int target) {
    return t.hits > target || t.hits + t.unknown < target;
}

bool all_different(const params::AllDifferent& p, const std::vector<int>& scope, const Grid& g) {
    std::uint64_t seen = 0;
    for (std::size_t k = 0; k < scope.size(); ++k) {
        const CellState& s = g.at(scope[k]);
        int key;
        if (p.keys.empty()) {
            if (!s.is_assigned()) continue;
            key = s.value();
        } else {
            if (!s.holds(p.active)) continue;
            key = p.keys[k];
        }
        const std::uint64_t bit = std::uint64_t{1} << (key & 63);
        if (seen & bit) return true;
        seen |= bit;
    }
    return false;
}

bool line_sum(const params::LineSum& p, const std::vector<int>& scope, const Grid& g) {
    int sum = 0;
    int unknown = 0;
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (s.is_assigned()) {
            sum += numeric(s);
        } else if (s.is_unknown()) {
            ++unknown;
        }
    }
    return sum + unknown * p.min_value > p.target || sum + unknown * p.max_value < p.target;
}

bool weighted_sum(const params::WeightedLineSum& p, const std::vector<int>& scope,
                  const Grid& g) {
    int sum = 0;
    int open = 0;
    for (std::size_t k = 0; k < scope.size(); ++k) {
        const CellState& s = g.at(scope[k]);
        if (s.is_unknown()) {
            open += p.weights[k];
        } else if (s.holds(p.symbol)) {
            sum += p.weights[k];
        }
    }
    return sum > p.target || sum + open < p.target;
}

// Line feasibility for a run-length clue: can the unknown cells be completed
// so the blocks of `symbol` are exactly `runs`?
bool runs_feasible(const params::RunLengths& p, const std::vector<int>& scope, const Grid& g) {
    const int n = static_cast<int>(scope.size());
    const int k = static_cast<int>(p.runs.size());
    std::vector<char> can_fill(n), can_clear(n);
    for (int i = 0; i < n; ++i) {
        const CellState& s = g.at(scope[i]);
        can_fill[i] = s.is_unknown() || s.holds(p.symbol);
        can_clear[i] = s.is_unknown() || (s.is_assigned() && !s.holds(p.symbol));
    }
    // ok[i][j]: cells i.. can hold runs j.. exactly.
    std::vector<std::vector<char>> ok(n + 2, std::vector<char>(k + 1, 0));
    ok[n][k] = 1;
    ok[n + 1][k] = 1;
    for (int i = n - 1; i >= 0; --i) {
        for (int j = k; j >= 0; --j) {
            bool r = can_clear[i] && ok[i + 1][j];
            if (!r && j < k) {
                const int len = p.runs[j];
                if (i + len <= n) {
                    bool fits = true;
                    for (int t = i; t < i + len && fits; ++t) fits = can_fill[t];
                    if (fits) {
                        if (i + len == n) {
                            r = ok[n][j + 1];
                        } else {
                            r = can_clear[i + len] && ok[i + len + 1][j + 1];
                        }
                    }
                }
            }
            ok[i][j] = r;
        }
    }
    return ok[0][0];
}

bool max_run(const params::MaxRunLength& p, const std::vector<int>& scope, const Grid& g) {
    int run = 0;
    int prev = -1;
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (!s.is_assigned()) {
            run = 0;
            prev = -1;
            continue;
        }
        run = (s.value() == prev) ? run + 1 : 1;
        prev = s.value();
        if (run > p.limit) return true;
    }
    return false;
}

bool touching(const params::NoTouch& p, const std::vector<int>& scope, const Grid& g) {
    for (int i : scope) {
        if (!g.at(i).holds(p.symbol)) continue;
        for (int j : neighbours(g, i, p.hood)) {
            if (j > i && g.at(j).holds(p.symbol)) return true;
        }
    }
    return false;
}

bool inequality(const params::InequalityEdge& p, const std::vector<int>& scope, const Grid& g) {
    const CellState& a = g.at(scope[0]);
    const CellState& b = g.at(scope[1]);
    if (a.is_assigned() && b.is_assigned()) return !(numeric(a) < numeric(b));
    if (a.is_assigned() && numeric(a) >= p.max_value) return true;
    if (b.is_assigned() && numeric(b) <= p.min_value) return true;
    return false;
}

bool consecutive(const params::ConsecutiveEdge& p, const std::vector<int>& scope,
                 const Grid& g) {
    const CellState& a = g.at(scope[0]);
    const CellState& b = g.at(scope[1]);
    if (!a.is_assigned() || !b.is_assigned()) return false;
    return (std::abs(numeric(a) - numeric(b)) == 1) != p.consecutive;
}

bool visibility(const params::Visibility& p, const std::vector<int>& scope, const Grid& g) {
    int seen = 0;
    int tallest = 0;
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (!s.is_assigned()) {
            return seen > p.target;
        }
        if (numeric(s) > tallest) {
            tallest = numeric(s);
            ++seen;
        }
        if (tallest >= p.max_value) break;
    }
    return seen != p.target;
}

// Bounds on the visible count of a partly filled line holding each of
// 1..max_value once. Unknown cells can only take the values not yet placed.
bool visibility_dead(const params::Visibility& p, const std::vector<int>& scope, const Grid& g) {
    std::array<char, 64> placed{};
    for (int i : scope) {
        if (g.at(i).is_assigned() && numeric(g.at(i)) <= p.max_value && p.max_value < 64) placed[numeric(g.at(i))] = 1;
    }
    int top_missing = 0;
    for (int v = p.max_value; v >= 1 && !top_missing; --v) {
        if (!placed[v]) top_missing = v;
    }
    int upper = 0, lower = 0, tallest = 0, floor = 0;
    int cap = p.max_value;
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (s.is_assigned()) {
            const int v = numeric(s);
            // Past this cell only values above v can still be seen.
            cap = std::min(cap, upper + p.max_value - v + 1);
            if (v > tallest) ++upper;
            if (v > floor) ++lower;
            tallest = std::max(tallest, v);
            floor = std::max(floor, v);
        } else {
            if (top_missing > tallest) ++upper;
            floor = std::max(floor, top_missing);
        }
    }
    if (top_missing == p.max_value) ++lower;
    return p.target < lower || p.target > std::min(upper, cap);
}

// Cells seen from `index` along the four directions up to a blocked cell.
template <typename Visit>
void for_each_in_sight(const Grid& g, int index, Visit&& visit) {
    static constexpr int dr[4] = {-1, 1, 0, 0};
    static constexpr int dc[4] = {0, 0, -1, 1};
    const Coord origin = g.coord(index);
    for (int d = 0; d < 4; ++d) {
        Coord c{origin.row + dr[d], origin.col + dc[d]};
        while (g.in_bounds(c) && !g.at(c).is_blocked()) {
            if (visit(g.index(c))) return;
            c.row += dr[d];
            c.col += dc[d];
        }
    }
}

bool bulbs_clash(const params::Illumination& p, const std::vector<int>& scope, const Grid& g) {
    for (int i : scope) {
        if (!g.at(i).holds(p.symbol)) continue;
        bool clash = false;
        for_each_in_sight(g, i, [&](int j) {
            clash = g.at(j).holds(p.symbol);
            return clash;
        });
        if (clash) return true;
    }
    return false;
}

bool is_lit(const Grid& g, int index, int bulb) {
    if (g.at(index).holds(bulb)) return true;
    bool lit = false;
    for_each_in_sight(g, index, [&](int j) {
        lit = g.at(j).holds(bulb);
        return lit;
    });
    return lit;
}

bool illumination(const params::Illumination& p, const std::vector<int>& scope, const Grid& g) {
    if (bulbs_clash(p, scope, g)) return true;
    for (int i : scope) {
        if (g.at(i).is_unknown()) return false;
    }
    for (int i : scope) {
        if (!is_lit(g, i, p.symbol)) return true;
    }
    return false;
}

bool illumination_dead(const params::Illumination& p, const std::vector<int>& scope,
                       const Grid& g) {
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (!s.is_assigned() || s.holds(p.symbol)) continue;
        bool reachable = false;
        for_each_in_sight(g, i, [&](int j) {
            reachable = g.at(j).is_unknown() || g.at(j).holds(p.symbol);
            return reachable;
        });
        if (!reachable) return true;
    }
    return false;
}

bool gravity(const params::GravityFill& p, const std::vector<int>& scope, const Grid& g) {
    int deepest_filled = -1;
    int shallowest_empty = INT32_MAX;
    for (std::size_t k = 0; k < scope.size(); ++k) {
        const CellState& s = g.at(scope[k]);
        if (!s.is_assigned()) continue;
        if (s.holds(p.symbol)) {
            deepest_filled = std::max(deepest_filled, p.ranks[k]);
        } else {
            shallowest_empty = std::min(shallowest_empty, p.ranks[k]);
        }
    }
    return shallowest_empty <= deepest_filled;
}

// Kuhn's augmenting-path matching between `left` and `right` cells over
// orthogonal adjacency. Returns the matching size.
int max_matching(const Grid& g, const std::vector<int>& left, const std::vector<int>& right) {
    std::vector<int> owner(g.size(), -1);
    std::vector<char> is_right(g.size(), 0);
    for (int r : right) is_right[r] = 1;
    std::vector<std::vector<int>> adj(left.size());
    for (std::size_t l = 0; l < left.size(); ++l) {
        for (int n : neighbours(g, left[l], Neighborhood::Orthogonal)) {
            if (is_right[n]) adj[l].push_back(n);
        }
    }
    std::vector<int> stamp(g.size(), -1);
    auto augment = [&](auto&& self, int l, int round) -> bool {
        for (int r : adj[l]) {
            if (stamp[r] == round) continue;
            stamp[r] = round;
            if (owner[r] < 0 || self(self, owner[r], round)) {
                owner[r] = l;
                return true;
            }
        }
        return false;
    };
    int matched = 0;
    for (std::size_t l = 0; l < left.size(); ++l) {
        if (augment(augment, static_cast<int>(l), static_cast<int>(l))) ++matched;
    }
    return matched;
}

bool bijection(const params::Bijection& p, const std::vector<int>& scope, const Grid& g) {
    std::vector<int> tents;
    std::vector<int> open;  // tents plus unknown candidates
    bool complete = true;
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (s.holds(p.symbol)) {
            tents.push_back(i);
            open.push_back(i);
        } else if (s.is_unknown()) {
            open.push_back(i);
            complete = false;
        }
    }
    if (tents.size() > p.trees.size()) return true;
    if (max_matching(g, tents, p.trees) < static_cast<int>(tents.size())) return true;
    std::vector<char> is_open(g.size(), 0);
    for (int i : open) is_open[i] = 1;
    for (int t : p.trees) {
        bool any = false;
        for (int n : neighbours(g, t, Neighborhood::Orthogonal)) any = any || is_open[n];
        if (!any) return true;
    }
    if (complete) return tents.size() != p.trees.size();
    return false;
}

bool bijection_dead(const params::Bijection& p, const std::vector<int>& scope, const Grid& g) {
    std::vector<int> open;
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (s.is_unknown() || s.holds(p.symbol)) open.push_back(i);
    }
    return max_matching(g, p.trees, open) < static_cast<int>(p.trees.size());
}

bool disconnected(const params::Connectivity& p, const std::vector<int>& scope, const Grid& g) {
    std::vector<char> passable(g.size(), 0);
    int start = -1;
    int required = 0;
    for (int i : scope) {
        const CellState& s = g.at(i);
        if (s.is_unknown() || (s.is_assigned() && !s.holds(p.shaded))) passable[i] = 1;
        if (s.is_assigned() && !s.holds(p.shaded)) {
            ++required;
            if (start < 0) start = i;
        }
    }
    if (required <= 1) return false;
    std::vector<int> stack{start};
    std::vector<char> seen(g.size(), 0);
    seen[start] = 1;
    int reached = 0;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        const CellState& s = g.at(i);
        if (s.is_assigned() && !s.holds(p.shaded)) ++reached;
        for (int n : neighbours(g, i, Neighborhood::Orthogonal)) {
            if (passable[n] && !seen[n]) {
                seen[n] = 1;
                stack.push_back(n);
            }
        }
    }
    return reached < required;
}

bool fleet(const params::FleetComposition& p, const std::vector<int>& scope, const Grid& g) {
    int total = 0;
    for (int s : p.ships) total += s;
    const int longest = p.ships.empty() ? 0 : *std::max_element(p.ships.begin(), p.ships.end());

    std::vector<char> in_scope(g.size(), 0);
    for (int i : scope) in_scope[i] = 1;
    const Tally t = tally(scope, g, p.symbol);
    if (count_breached(t, total)) return true;

    std::vector<int> finished(longest + 1, 0);
    std::vector<char> seen(g.size(), 0);
    for (int i : scope) {
        if (seen[i] || !g.at(i).holds(p.symbol)) continue;
        std::vector<int> comp{i};
        seen[i] = 1;
        for (std::size_t k = 0; k < comp.size(); ++k) {
            for (int n : neighbours(g, comp[k], Neighborhood::Orthogonal)) {
                if (in_scope[n] && !seen[n] && g.at(n).holds(p.symbol)) {
                    seen[n] = 1;
                    comp.push_back(n);
                }
            }
        }
        bool same_row = true;
        bool same_col = true;
        const Coord first = g.coord(comp.front());
        for (int c : comp) {
            same_row = same_row && g.coord(c).row == first.row;
            same_col = same_col && g.coord(c).col == first.col;
        }
        if (!same_row && !same_col) return true;
        const int len = static_cast<int>(comp.size());
        if (len > longest) return true;
        bool closed = true;
        for (int c : comp) {
            for (int n : neighbours(g, c, Neighborhood::Orthogonal)) {
                if (in_scope[n] && g.at(n).is_unknown()) closed = false;
            }
        }
        if (closed) ++finished[len];
    }
    std::vector<int> wanted(longest + 1, 0);
    for (int s : p.ships) ++wanted[s];
    for (int len = 1; len <= longest; ++len) {
        if (finished[len] > wanted[len]) return true;
    }
    if (t.unknown == 0) {
        for (int len = 1; len <= longest; ++len) {
            if (finished[len] != wanted[len]) return true;
        }
    }
    return false;
}

bool check(const Constraint& c, const Grid& g) {
    const auto& scope = c.scope;
    return std::visit(
        overloaded{
            [&](const params::AllDifferent& p) { return all_different(p, scope, g); },
            [&](const params::LineSum& p) { return line_sum(p, scope, g); },
            [&](const params::WeightedLineSum& p) { return weighted_sum(p, scope, g); },
            [&](const params::LineCount& p) {
                return count_breached(tally(scope, g, p.symbol), p.target);
            },
            [&](const params::RunLengths& p) { return !runs_feasible(p, scope, g); },
            [&](const params::MaxRunLength& p) { return max_run(p, scope, g); },
            [&](const params::NoTouch& p) { return touching(p, scope, g); },
            [&](const params::AdjacencyCount& p) {
                return count_breached(tally(scope, g, p.symbol), p.target);
            },
            [&](const params::ParityMask& p) {
                const CellState& s = g.at(scope[0]);
                return s.is_assigned() && ((numeric(s) % 2 == 0) != p.even);
            },
            [&](const params::InequalityEdge& p) { return inequality(p, scope, g); },
            [&](const params::ConsecutiveEdge& p) { return consecutive(p, scope, g); },
            [&](const params::Visibility& p) { return visibility(p, scope, g); },
            [&](const params::Illumination& p) { return illumination(p, scope, g); },
            [&](const params::GravityFill& p) { return gravity(p, scope, g); },
            [&](const params::Bijection& p) { return bijection(p, scope, g); },
            [&](const params::Connectivity& p) { return disconnected(p, scope, g); },
            [&](const params::FleetComposition& p) { return fleet(p, scope, g); },
            [&](const params::NeighborMineCount& p) {
                return count_breached(tally(scope, g, p.symbol), p.target);
            },
            [&](const params::AdjacentNotEqual&) {
                const CellState& a = g.at(scope[0]);
                const CellState& b = g.at(scope[1]);
                return a.is_assigned() && b.is_assigned() && a.value() == b.value();
            },
        },
        c.params);
}

} // namespace

std::string_view to_string(ConstraintKind kind) {
    static constexpr std::string_view names[kConstraintKindCount] = {
        "AllDifferent",    "LineSum",        "WeightedLineSum",   "LineCount",
        "RunLengths",      "MaxRunLength",   "NoTouch",           "AdjacencyCount",
        "ParityMask",      "InequalityEdge", "ConsecutiveEdge",   "Visibility",
        "Illumination",    "GravityFill",    "Bijection",         "Connectivity",
        "FleetComposition", "NeighborMineCount", "AdjacentNotEqual",
    };
    return names[static_cast<int>(kind)];
}

std::vector<int> neighbours(const Grid& grid, int index, Neighborhood hood) {
    std::vector<int> out;
    const Coord c = grid.coord(index);
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const bool diagonal = dr != 0 && dc != 0;
            if (hood == Neighborhood::Orthogonal && diagonal) continue;
            if (hood == Neighborhood::DiagonalOnly && !diagonal) continue;
            const Coord n{c.row + dr, c.col + dc};
            if (grid.in_bounds(n)) out.push_back(grid.index(n));
        }
    }
    return out;
}

bool violated(const Constraint& constraint, const Grid& state) { return check(constraint, state); }

bool dead_end(const Constraint& constraint, const Grid& state) {
    if (check(constraint, state)) return true;
    switch (constraint.kind()) {
    case ConstraintKind::Illumination:
        return illumination_dead(constraint.as<params::Illumination>(), constraint.scope, state);
    case ConstraintKind::Visibility:
        return visibility_dead(constraint.as<params::Visibility>(), constraint.scope, state);
    case ConstraintKind::Bijection:
        return bijection_dead(constraint.as<params::Bijection>(), constraint.scope, state);
    default:
        return false;
    }
}

std::vector<int> offending_cells(const Constraint& constraint, const Grid& state) {
    if (!check(constraint, state)) return {};
    std::vector<int> out;
    if (const auto* p = std::get_if<params::AllDifferent>(&constraint.params)) {
        const auto& scope = constraint.scope;
        auto key_of = [&](std::size_t k) -> int {
            const CellState& s = state.at(scope[k]);
            if (p->keys.empty()) return s.is_assigned() ? s.value() : -1;
            return s.holds(p->active) ? p->keys[k] : -1;
        };
        for (std::size_t a = 0; a < scope.size(); ++a) {
            const int ka = key_of(a);
            if (ka < 0) continue;
            for (std::size_t b = 0; b < scope.size(); ++b) {
                if (a != b && key_of(b) == ka) {
                    out.push_back(scope[a]);
                    break;
                }
            }
        }
        return out;
    }
    for (int i : constraint.scope) {
        if (state.at(i).is_assigned()) out.push_back(i);
    }
    return out;
}

} // namespace gridforge
