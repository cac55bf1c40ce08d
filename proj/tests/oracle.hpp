#pragma once

// Reference checks written straight from the puzzle rules. Nothing here calls
// into the library's constraint code; tests compare the library against these.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gridforge/instance.hpp"

namespace oracle {

using gridforge::Coord;
using gridforge::Structures;
using Board = std::vector<std::vector<std::string>>;

inline int as_num(const std::string& t) {
    if (t.empty() || t.size() > 2 || !std::all_of(t.begin(), t.end(), ::isdigit)) return -1;
    return std::stoi(t);
}

inline bool latin(const Board& b) {
    const int n = static_cast<int>(b.size());
    for (int i = 0; i < n; ++i) {
        std::set<int> row, col;
        for (int j = 0; j < n; ++j) {
            const int a = as_num(b[i][j]), c = as_num(b[j][i]);
            if (a < 1 || a > n || c < 1 || c > n) return false;
            row.insert(a);
            col.insert(c);
        }
        if (static_cast<int>(row.size()) != n || static_cast<int>(col.size()) != n) return false;
    }
    return true;
}

inline bool blocks(const Board& b) {
    const int n = static_cast<int>(b.size());
    const int k = n == 9 ? 3 : 2;
    for (int br = 0; br < n; br += k) {
        for (int bc = 0; bc < n; bc += k) {
            std::set<std::string> seen;
            for (int r = br; r < br + k; ++r) {
                for (int c = bc; c < bc + k; ++c) seen.insert(b[r][c]);
            }
            if (static_cast<int>(seen.size()) != n) return false;
        }
    }
    return true;
}

inline bool groups_distinct(const Board& b, const std::vector<int>& groups) {
    const int cols = static_cast<int>(b[0].size());
    std::map<int, std::multiset<std::string>> by;
    for (std::size_t i = 0; i < groups.size(); ++i) by[groups[i]].insert(b[i / cols][i % cols]);
    for (const auto& [g, vals] : by) {
        if (std::set<std::string>(vals.begin(), vals.end()).size() != vals.size()) return false;
    }
    return true;
}

inline bool line_counts(const Board& b, const std::string& sym, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
    const int R = static_cast<int>(b.size()), C = static_cast<int>(b[0].size());
    for (int r = 0; r < R; ++r) {
        if (std::count(b[r].begin(), b[r].end(), sym) != rows[r]) return false;
    }
    for (int c = 0; c < C; ++c) {
        int k = 0;
        for (int r = 0; r < R; ++r) k += b[r][c] == sym;
        if (k != cols[c]) return false;
    }
    return true;
}

inline std::vector<int> runs_of(const std::vector<std::string>& line, const std::string& sym) {
    std::vector<int> out;
    int run = 0;
    for (const auto& t : line) {
        if (t == sym) {
            ++run;
        } else if (run) {
            out.push_back(run);
            run = 0;
        }
    }
    if (run) out.push_back(run);
    return out;
}

inline std::vector<std::string> column(const Board& b, int c) {
    std::vector<std::string> out;
    for (const auto& row : b) out.push_back(row[c]);
    return out;
}

inline int seen(const std::vector<int>& line) {
    int best = 0, k = 0;
    for (int v : line) {
        if (v > best) {
            best = v;
            ++k;
        }
    }
    return k;
}

inline bool near8(Coord a, Coord b) { return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)) == 1; }

inline std::vector<Coord> cells_with(const Board& b, const std::string& sym) {
    std::vector<Coord> out;
    for (int r = 0; r < static_cast<int>(b.size()); ++r) {
        for (int c = 0; c < static_cast<int>(b[r].size()); ++c) {
            if (b[r][c] == sym) out.push_back({r, c});
        }
    }
    return out;
}

// Orthogonal components of `sym`.
inline std::vector<std::vector<Coord>> components(const Board& b, const std::string& sym) {
    const int R = static_cast<int>(b.size()), C = static_cast<int>(b[0].size());
    std::vector<std::vector<char>> seen_(R, std::vector<char>(C, 0));
    std::vector<std::vector<Coord>> out;
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            if (b[r][c] != sym || seen_[r][c]) continue;
            std::vector<Coord> comp, stack{{r, c}};
            seen_[r][c] = 1;
            while (!stack.empty()) {
                Coord p = stack.back();
                stack.pop_back();
                comp.push_back(p);
                const int dr[] = {1, -1, 0, 0}, dc[] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const int nr = p.row + dr[d], nc = p.col + dc[d];
                    if (nr < 0 || nc < 0 || nr >= R || nc >= C || seen_[nr][nc] || b[nr][nc] != sym) continue;
                    seen_[nr][nc] = 1;
                    stack.push_back({nr, nc});
                }
            }
            out.push_back(comp);
        }
    }
    return out;
}

inline bool no_touch8(const std::vector<Coord>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            if (near8(cells[i], cells[j])) return false;
        }
    }
    return true;
}

// Perfect matching between tents and trees along orthogonal adjacency.
inline bool tents_match(const std::vector<Coord>& tents, const std::vector<Coord>& trees) {
    if (tents.size() != trees.size()) return false;
    std::vector<int> owner(trees.size(), -1);
    std::function<bool(int, std::vector<char>&)> augment = [&](int t, std::vector<char>& used) {
        for (std::size_t k = 0; k < trees.size(); ++k) {
            if (used[k] || std::abs(tents[t].row - trees[k].row) + std::abs(tents[t].col - trees[k].col) != 1) continue;
            used[k] = 1;
            if (owner[k] < 0 || augment(owner[k], used)) {
                owner[k] = t;
                return true;
            }
        }
        return false;
    };
    for (std::size_t t = 0; t < tents.size(); ++t) {
        std::vector<char> used(trees.size(), 0);
        if (!augment(static_cast<int>(t), used)) return false;
    }
    return true;
}

// Is `b` (every cell filled) a solution of puzzle `id` under structures `s`?
inline bool valid(const std::string& id, const Structures& s, const Board& b) {
    const int R = static_cast<int>(b.size()), C = static_cast<int>(b[0].size());
    auto all_in = [&](std::initializer_list<const char*> allowed) {
        for (const auto& row : b) {
            for (const auto& t : row) {
                if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return t == a; })) return false;
            }
        }
        return true;
    };
    if (id == "sudoku") return latin(b) && blocks(b);
    if (id == "colored-sudoku" || id == "jigsaw-sudoku") return latin(b) && groups_distinct(b, s.regions);
    if (id == "killer-sudoku") {
        if (!latin(b) || !blocks(b)) return false;
        for (const auto& cage : s.cages) {
            int sum = 0;
            for (Coord c : cage.cells) sum += as_num(b[c.row][c.col]);
            if (sum != cage.target) return false;
        }
        return true;
    }
    if (id == "odd-even-sudoku") {
        if (!latin(b) || !blocks(b)) return false;
        for (int i = 0; i < R * C; ++i) {
            if (s.parity[i] >= 0 && (as_num(b[i / C][i % C]) % 2 == 0) != (s.parity[i] == 1)) return false;
        }
        return true;
    }
    if (id == "futoshiki") {
        if (!latin(b)) return false;
        for (const auto& e : s.inequalities) {
            if (!(as_num(b[e.a.row][e.a.col]) < as_num(b[e.b.row][e.b.col]))) return false;
        }
        return true;
    }
    if (id == "renzoku") {
        if (!latin(b)) return false;
        std::set<std::pair<Coord, Coord>> dots;
        for (const auto& e : s.dots) {
            dots.insert({e.a, e.b});
            dots.insert({e.b, e.a});
        }
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < C; ++c) {
                for (Coord n : {Coord{r, c + 1}, Coord{r + 1, c}}) {
                    if (n.row >= R || n.col >= C) continue;
                    const bool consecutive = std::abs(as_num(b[r][c]) - as_num(b[n.row][n.col])) == 1;
                    if (consecutive != (dots.count({Coord{r, c}, n}) > 0)) return false;
                }
            }
        }
        return true;
    }
    if (id == "skyscraper") {
        if (!latin(b)) return false;
        for (int i = 0; i < C; ++i) {
            std::vector<int> col, row;
            for (int k = 0; k < C; ++k) {
                col.push_back(as_num(b[k][i]));
                row.push_back(as_num(b[i][k]));
            }
            auto check = [](int clue, std::vector<int> line, bool rev) {
                if (rev) std::reverse(line.begin(), line.end());
                return clue <= 0 || seen(line) == clue;
            };
            if (!check(s.top[i], col, false) || !check(s.bottom[i], col, true) || !check(s.left[i], row, false) ||
                !check(s.right[i], row, true)) {
                return false;
            }
        }
        return true;
    }
    if (id == "kakuro") {
        for (int r = 0; r < R; ++r) {
            int sum = 0;
            for (int c = 0; c < C; ++c) {
                const int v = as_num(b[r][c]);
                if (v < 1 || v > C) return false;
                sum += v;
                if (c + 1 < C && b[r][c] == b[r][c + 1]) return false;
                if (r + 1 < R && b[r][c] == b[r + 1][c]) return false;
            }
            if (sum != s.row_clues[r]) return false;
        }
        for (int c = 0; c < C; ++c) {
            int sum = 0;
            for (int r = 0; r < R; ++r) sum += as_num(b[r][c]);
            if (sum != s.col_clues[c]) return false;
        }
        return true;
    }
    if (id == "binairo") {
        if (!all_in({"w", "b"})) return false;
        for (int i = 0; i < std::max(R, C); ++i) {
            for (const auto& line : {i < R ? b[i] : std::vector<std::string>{}, i < C ? column(b, i) : std::vector<std::string>{}}) {
                for (std::size_t k = 2; k < line.size(); ++k) {
                    if (line[k] == line[k - 1] && line[k] == line[k - 2]) return false;
                }
            }
        }
        return true;
    }
    if (id == "hitori") {
        if (!all_in({"s", "e"})) return false;
        for (int i = 0; i < R; ++i) {
            std::set<int> row, col;
            for (int k = 0; k < C; ++k) {
                if (b[i][k] == "e" && !row.insert(s.numbers[i * C + k]).second) return false;
            }
            for (int k = 0; k < R; ++k) {
                if (b[k][i] == "e" && !col.insert(s.numbers[k * C + i]).second) return false;
            }
        }
        // Shaded cells never share an edge.
        for (const auto& comp : components(b, "s")) {
            if (comp.size() > 1) return false;
        }
        return components(b, "e").size() <= 1;
    }
    if (id == "aquarium") {
        if (!all_in({"s", "e"}) || !line_counts(b, "s", s.row_clues, s.col_clues)) return false;
        for (int i = 0; i < R * C; ++i) {
            if (b[i / C][i % C] != "s") continue;
            for (int j = 0; j < R * C; ++j) {
                if (s.regions[j] == s.regions[i] && j / C >= i / C && b[j / C][j % C] != "s") return false;
            }
        }
        return true;
    }
    if (id == "thermometers") {
        if (!all_in({"s", "e"}) || !line_counts(b, "s", s.row_clues, s.col_clues)) return false;
        for (const auto& path : s.thermometers) {
            bool filled = true;
            for (Coord c : path) {
                if (b[c.row][c.col] == "s" && !filled) return false;
                filled = filled && b[c.row][c.col] == "s";
            }
        }
        return true;
    }
    if (id == "battle-ships") {
        if (!all_in({"s", "e"}) || !line_counts(b, "s", s.row_clues, s.col_clues)) return false;
        std::vector<int> lengths;
        for (const auto& comp : components(b, "s")) {
            const bool one_row = std::all_of(comp.begin(), comp.end(), [&](Coord c) { return c.row == comp[0].row; });
            const bool one_col = std::all_of(comp.begin(), comp.end(), [&](Coord c) { return c.col == comp[0].col; });
            if (!one_row && !one_col) return false;
            lengths.push_back(static_cast<int>(comp.size()));
        }
        std::vector<int> fleet = s.fleet;
        std::sort(fleet.begin(), fleet.end());
        std::sort(lengths.begin(), lengths.end());
        if (fleet != lengths) return false;
        const auto ships = cells_with(b, "s");
        for (Coord a : ships) {
            for (Coord c : ships) {
                if (std::abs(a.row - c.row) == 1 && std::abs(a.col - c.col) == 1) return false;
            }
        }
        return true;
    }
    if (id == "field-explore") {
        if (!all_in({"s", "e"})) return false;
        for (const auto& rv : s.revealed) {
            int mines = 0;
            for (Coord m : cells_with(b, "s")) mines += near8(m, rv.cell);
            if (mines != rv.number) return false;
        }
        return true;
    }
    if (id == "kakurasu") {
        if (!all_in({"s", "e"})) return false;
        for (int r = 0; r < R; ++r) {
            int sum = 0;
            for (int c = 0; c < C; ++c) sum += b[r][c] == "s" ? c + 1 : 0;
            if (sum != s.row_clues[r]) return false;
        }
        for (int c = 0; c < C; ++c) {
            int sum = 0;
            for (int r = 0; r < R; ++r) sum += b[r][c] == "s" ? r + 1 : 0;
            if (sum != s.col_clues[c]) return false;
        }
        return true;
    }
    if (id == "nonogram") {
        if (!all_in({"s", "e"})) return false;
        for (int r = 0; r < R; ++r) {
            if (runs_of(b[r], "s") != s.row_runs[r]) return false;
        }
        for (int c = 0; c < C; ++c) {
            if (runs_of(column(b, c), "s") != s.col_runs[c]) return false;
        }
        return true;
    }
    if (id == "star-battle") {
        if (!all_in({"s", "e"})) return false;
        const auto stars = cells_with(b, "s");
        std::map<int, int> per_row, per_col, per_region;
        for (Coord c : stars) {
            ++per_row[c.row];
            ++per_col[c.col];
            ++per_region[s.regions[c.row * C + c.col]];
        }
        const int regions = *std::max_element(s.regions.begin(), s.regions.end()) + 1;
        if (static_cast<int>(per_row.size()) != R || static_cast<int>(per_col.size()) != C ||
            static_cast<int>(per_region.size()) != regions) {
            return false;
        }
        for (auto* m : {&per_row, &per_col, &per_region}) {
            for (const auto& [k, v] : *m) {
                if (v != 1) return false;
            }
        }
        return no_touch8(stars);
    }
    if (id == "light-up") {
        std::map<Coord, int> walls;
        for (const auto& w : s.walls) walls[w.cell] = w.number;
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < C; ++c) {
                const bool wall = walls.count({r, c}) > 0;
                if (wall != (b[r][c] == "w")) return false;
                if (!wall && b[r][c] != "s" && b[r][c] != "e") return false;
            }
        }
        auto lit_by = [&](int r, int c) {
            int bulbs = 0;
            const int dr[] = {1, -1, 0, 0}, dc[] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                for (int nr = r + dr[d], nc = c + dc[d]; nr >= 0 && nc >= 0 && nr < R && nc < C && b[nr][nc] != "w";
                     nr += dr[d], nc += dc[d]) {
                    bulbs += b[nr][nc] == "s";
                }
            }
            return bulbs;
        };
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < C; ++c) {
                if (b[r][c] == "s" && lit_by(r, c) > 0) return false;
                if (b[r][c] == "e" && lit_by(r, c) == 0) return false;
            }
        }
        for (const auto& [cell, number] : walls) {
            if (number < 0) continue;
            int k = 0;
            for (Coord n : {Coord{cell.row + 1, cell.col}, Coord{cell.row - 1, cell.col}, Coord{cell.row, cell.col + 1},
                            Coord{cell.row, cell.col - 1}}) {
                if (n.row >= 0 && n.col >= 0 && n.row < R && n.col < C) k += b[n.row][n.col] == "s";
            }
            if (k != number) return false;
        }
        return true;
    }
    if (id == "trees-and-tents") {
        std::set<Coord> trees(s.trees.begin(), s.trees.end());
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < C; ++c) {
                const bool tree = trees.count({r, c}) > 0;
                if (tree != (b[r][c] == "tr")) return false;
                if (!tree && b[r][c] != "tt" && b[r][c] != "e") return false;
            }
        }
        if (!line_counts(b, "tt", s.row_clues, s.col_clues)) return false;
        const auto tents = cells_with(b, "tt");
        return no_touch8(tents) && tents_match(tents, s.trees);
    }
    return false;
}

inline std::vector<std::string> symbols_of(const gridforge::PuzzleInstance& inst) {
    const std::string& id = inst.definition_id();
    if (id == "binairo") return {"w", "b"};
    if (id == "trees-and-tents") return {"tt", "e"};
    if (inst.alphabet().numeric()) {
        std::vector<std::string> out;
        for (int v = 1; v <= inst.cols(); ++v) out.push_back(std::to_string(v));
        return out;
    }
    return {"s", "e"};
}

// Board before solving: walls / trees, conditions, "*" elsewhere.
inline Board start_board(const gridforge::PuzzleInstance& inst) {
    Board b(inst.rows(), std::vector<std::string>(inst.cols(), "*"));
    for (const auto& w : inst.structures().walls) b[w.cell.row][w.cell.col] = "w";
    if (inst.definition_id() == "trees-and-tents") {
        for (Coord t : inst.structures().trees) b[t.row][t.col] = "tr";
    }
    for (const auto& c : inst.conditions()) b[c.cell.row][c.cell.col] = c.value;
    return b;
}

// Exhaustive enumeration over the open cells; stops at `cap`.
inline long long brute_count(const gridforge::PuzzleInstance& inst, long long cap, Board* first = nullptr) {
    Board b = start_board(inst);
    std::vector<Coord> open;
    for (int r = 0; r < inst.rows(); ++r) {
        for (int c = 0; c < inst.cols(); ++c) {
            if (b[r][c] == "*") open.push_back({r, c});
        }
    }
    const auto syms = symbols_of(inst);
    std::vector<std::size_t> digit(open.size(), 0);
    for (std::size_t k = 0; k < open.size(); ++k) b[open[k].row][open[k].col] = syms[0];
    long long count = 0;
    while (true) {
        if (valid(inst.definition_id(), inst.structures(), b)) {
            if (count == 0 && first) *first = b;
            if (++count >= cap) return count;
        }
        std::size_t k = 0;
        while (k < open.size()) {
            if (++digit[k] < syms.size()) {
                b[open[k].row][open[k].col] = syms[digit[k]];
                break;
            }
            digit[k] = 0;
            b[open[k].row][open[k].col] = syms[0];
            ++k;
        }
        if (k == open.size()) return count;
    }
}

// Completed 4x4 Sudoku grids, counted row permutation by row permutation.
inline long long count_4x4_sudoku() {
    std::vector<std::vector<int>> perms;
    std::vector<int> p{1, 2, 3, 4};
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    long long n = 0;
    for (const auto& a : perms) {
        for (const auto& b : perms) {
            for (const auto& c : perms) {
                for (const auto& d : perms) {
                    const std::vector<std::vector<int>> g{a, b, c, d};
                    bool ok = true;
                    for (int col = 0; col < 4 && ok; ++col) {
                        std::set<int> s{g[0][col], g[1][col], g[2][col], g[3][col]};
                        ok = s.size() == 4;
                    }
                    for (int br = 0; br < 4 && ok; br += 2) {
                        for (int bc = 0; bc < 4 && ok; bc += 2) {
                            std::set<int> s{g[br][bc], g[br][bc + 1], g[br + 1][bc], g[br + 1][bc + 1]};
                            ok = s.size() == 4;
                        }
                    }
                    n += ok;
                }
            }
        }
    }
    return n;
}

// SVG reading: cells come from glyph geometry relative to the frame, values
// from glyph text or shape.
struct Element {
    std::string tag;
    std::map<std::string, std::string> attrs;
    std::string text;
};

inline std::vector<Element> svg_elements(const std::string& svg) {
    static const std::regex el(R"re(<([a-z]+)((?:\s+[a-z-]+="[^"]*")*)\s*(/>|>([^<]*)</\1>|>))re");
    static const std::regex at(R"re(([a-z-]+)="([^"]*)")re");
    std::vector<Element> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), el); it != std::sregex_iterator(); ++it) {
        Element e;
        e.tag = (*it)[1];
        const std::string attrs = (*it)[2];
        for (auto a = std::sregex_iterator(attrs.begin(), attrs.end(), at); a != std::sregex_iterator(); ++a) {
            e.attrs[(*a)[1]] = (*a)[2];
        }
        e.text = (*it)[4];
        out.push_back(std::move(e));
    }
    return out;
}

inline double attr(const Element& e, const std::string& k) { return std::stod(e.attrs.at(k)); }

inline std::pair<double, double> centre(const Element& e) {
    if (e.tag == "text") return {attr(e, "x"), attr(e, "y")};
    if (e.tag == "circle") return {attr(e, "cx"), attr(e, "cy")};
    if (e.tag == "rect") return {attr(e, "x") + attr(e, "width") / 2, attr(e, "y") + attr(e, "height") / 2};
    if (e.tag == "polygon") {
        std::istringstream in(e.attrs.at("points"));
        double sx = 0, sy = 0, x, y;
        char comma;
        int n = 0;
        while (in >> x >> comma >> y) {
            sx += x;
            sy += y;
            ++n;
        }
        return {sx / n, sy / n};
    }
    return {-1, -1};
}

inline int polygon_points(const Element& e) {
    return static_cast<int>(std::count(e.attrs.at("points").begin(), e.attrs.at("points").end(), ','));
}

// Condition board as drawn: "*" where the picture shows no fixed content.
inline Board read_conditions(const std::string& svg, const std::string& id, int rows, int cols) {
    const auto els = svg_elements(svg);
    double fx = 0, fy = 0, fw = 1, fh = 1;
    std::string background;
    for (const auto& e : els) {
        auto role = e.attrs.find("data-role");
        if (role == e.attrs.end()) continue;
        if (role->second == "frame") {
            fx = attr(e, "x");
            fy = attr(e, "y");
            fw = attr(e, "width");
            fh = attr(e, "height");
        }
        if (role->second == "background") background = e.attrs.at("fill");
    }
    const double cw = fw / cols, ch = fh / rows;
    Board b(rows, std::vector<std::string>(cols, "*"));
    for (const auto& e : els) {
        auto role = e.attrs.find("data-role");
        if (role == e.attrs.end()) continue;
        const bool given = role->second == "given";
        const bool revealed = id == "field-explore" && role->second == "number";
        if (!given && !revealed) continue;
        const auto [px, py] = centre(e);
        const int r = static_cast<int>(std::floor((py - fy) / ch));
        const int c = static_cast<int>(std::floor((px - fx) / cw));
        if (r < 0 || c < 0 || r >= rows || c >= cols) continue;
        std::string v;
        if (revealed) {
            v = "e";
        } else if (e.tag == "text") {
            v = e.text;
        } else if (e.tag == "circle" && id == "binairo") {
            v = e.attrs.at("fill") == background ? "w" : "b";
        } else if (e.tag == "circle") {
            v = attr(e, "r") < 0.15 * cw ? "e" : "s";
        } else if (e.tag == "polygon") {
            v = id == "trees-and-tents" && polygon_points(e) == 3 ? "tt" : "s";
        } else if (e.tag == "rect") {
            v = "s";
        }
        b[r][c] = v;
    }
    return b;
}

} // namespace oracle
