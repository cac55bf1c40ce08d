#include "gridforge/generator.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "gridforge/rng.hpp"

namespace gridforge {

namespace {

constexpr int kS = 0;  // "s" / "tt" / "w"
constexpr int kE = 1;  // "e" / "b"

std::vector<int> orth(int rows, int cols, int i) {
    std::vector<int> out;
    const int r = i / cols, c = i % cols;
    if (r > 0) out.push_back(i - cols);
    if (c > 0) out.push_back(i - 1);
    if (c + 1 < cols) out.push_back(i + 1);
    if (r + 1 < rows) out.push_back(i + cols);
    return out;
}

std::vector<int> ring(int rows, int cols, int i) {
    std::vector<int> out;
    const int r = i / cols, c = i % cols;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if ((dr || dc) && r + dr >= 0 && r + dr < rows && c + dc >= 0 && c + dc < cols) {
                out.push_back((r + dr) * cols + c + dc);
            }
        }
    }
    return out;
}

// Randomised DFS completion of an instance's empty grid: fewest candidates
// first, candidate order shuffled.
class Filler {
public:
    Filler(const PuzzleInstance& inst, Rng& rng, std::int64_t budget)
        : inst_(inst), rng_(rng), budget_(budget), grid_(inst.grid()) {}

    std::optional<Grid> run() {
        if (!consistent(inst_, grid_)) return std::nullopt;
        if (dfs()) return grid_;
        return std::nullopt;
    }

private:
    void cands(int index, std::vector<int>& out) {
        out.clear();
        const auto& cs = inst_.constraints();
        for (int v = 0; v < inst_.alphabet().size(); ++v) {
            grid_.set(index, CellState::assigned(v));
            bool ok = true;
            for (int k : inst_.constraints_at(index)) {
                if (dead_end(cs[k], grid_)) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back(v);
        }
        grid_.set(index, CellState::unknown());
    }

    bool dfs() {
        int best = -1;
        std::vector<int> best_vals, buf;
        for (int i = 0; i < grid_.size(); ++i) {
            if (!grid_.at(i).is_unknown()) continue;
            cands(i, buf);
            if (buf.empty()) return false;
            if (best < 0 || buf.size() < best_vals.size()) {
                best = i;
                best_vals = buf;
            }
        }
        if (best < 0) return true;
        rng_.shuffle(best_vals);
        for (int v : best_vals) {
            if (--budget_ < 0) return false;
            grid_.set(best, CellState::assigned(v));
            bool dead = false;
            for (int k : inst_.constraints_at(best)) {
                if (dead_end(inst_.constraints()[k], grid_)) {
                    dead = true;
                    break;
                }
            }
            if (!dead && dfs()) return true;
            grid_.set(best, CellState::unknown());
        }
        return false;
    }

    const PuzzleInstance& inst_;
    Rng& rng_;
    std::int64_t budget_;
    Grid grid_;
};

std::optional<Grid> random_fill(const std::string& id, int rows, int cols, const Structures& s, Rng& rng,
                                std::int64_t budget = 50'000) {
    PuzzleInstance empty(id, rows, cols, s, {}, std::nullopt, 0, Difficulty::Easy);
    return Filler(empty, rng, budget).run();
}

Grid fill_or_throw(const std::string& id, int rows, int cols, const Structures& s, Rng& rng) {
    for (int attempt = 0; attempt < 50; ++attempt) {
        if (auto g = random_fill(id, rows, cols, s, rng)) return *g;
    }
    throw Error(ErrorCode::GenerationFailed, "could not fill a " + id + " grid");
}

Grid latin(int n, Rng& rng) { return fill_or_throw("futoshiki", n, n, {}, rng); }

int num(const Grid& g, int i) { return g.at(i).value() + 1; }

Grid token_grid(int rows, int cols, const std::vector<char>& on) {
    Grid g(rows, cols);
    for (int i = 0; i < rows * cols; ++i) g.set(i, CellState::assigned(on[i] ? kS : kE));
    return g;
}

void count_lines(const Grid& g, Structures& s, int symbol) {
    s.row_clues.assign(g.rows(), 0);
    s.col_clues.assign(g.cols(), 0);
    for (int i = 0; i < g.size(); ++i) {
        if (g.at(i).holds(symbol)) {
            ++s.row_clues[i / g.cols()];
            ++s.col_clues[i % g.cols()];
        }
    }
}

bool connected(int rows, int cols, const std::vector<int>& region, int id) {
    int start = -1, total = 0;
    for (int i = 0; i < rows * cols; ++i) {
        if (region[i] == id) {
            ++total;
            if (start < 0) start = i;
        }
    }
    if (total == 0) return true;
    std::vector<char> seen(rows * cols, 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    int reached = 0;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        ++reached;
        for (int n : orth(rows, cols, i)) {
            if (!seen[n] && region[n] == id) {
                seen[n] = 1;
                stack.push_back(n);
            }
        }
    }
    return reached == total;
}

// Multi-source random growth; every cell ends in the region of some seed.
std::vector<int> grow_regions(int rows, int cols, const std::vector<int>& seeds, Rng& rng) {
    std::vector<int> region(rows * cols, -1);
    std::vector<std::pair<int, int>> frontier;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        region[seeds[k]] = static_cast<int>(k);
        for (int n : orth(rows, cols, seeds[k])) frontier.push_back({n, static_cast<int>(k)});
    }
    while (!frontier.empty()) {
        const std::size_t pick = rng.below(frontier.size());
        auto [cell, id] = frontier[pick];
        frontier[pick] = frontier.back();
        frontier.pop_back();
        if (region[cell] >= 0) continue;
        region[cell] = id;
        for (int n : orth(rows, cols, cell)) {
            if (region[n] < 0) frontier.push_back({n, id});
        }
    }
    return region;
}

// N connected regions of N cells: start from row bands and swap boundary
// cells while both sides stay connected.
std::vector<int> jigsaw_regions(int n, Rng& rng) {
    std::vector<int> region(n * n);
    for (int i = 0; i < n * n; ++i) region[i] = i / n;
    for (int t = 0; t < n * n * 30; ++t) {
        const int a = static_cast<int>(rng.below(n * n));
        const auto adj = orth(n, n, a);
        const int b = adj[rng.below(adj.size())];
        if (region[a] == region[b]) continue;
        // Move a into b's region and some cell of b's region next to a's region back.
        std::vector<int> back;
        for (int i = 0; i < n * n; ++i) {
            if (region[i] != region[b] || i == b) continue;
            for (int x : orth(n, n, i)) {
                if (region[x] == region[a] && x != a) {
                    back.push_back(i);
                    break;
                }
            }
        }
        if (back.empty()) continue;
        const int c = back[rng.below(back.size())];
        const int ra = region[a], rb = region[b];
        region[a] = rb;
        region[c] = ra;
        if (!connected(n, n, region, ra) || !connected(n, n, region, rb)) {
            region[a] = ra;
            region[c] = rb;
        }
    }
    return region;
}

GeneratedSolution gen_sudoku(int n, Rng& rng) { return {fill_or_throw("sudoku", n, n, {}, rng), {}}; }

GeneratedSolution gen_killer(int n, Rng& rng) {
    GeneratedSolution out = gen_sudoku(n, rng);
    std::vector<int> cage(n * n, -1);
    std::vector<int> order(n * n);
    for (int i = 0; i < n * n; ++i) order[i] = i;
    rng.shuffle(order);
    for (int start : order) {
        if (cage[start] >= 0) continue;
        const int id = static_cast<int>(out.structures.cages.size());
        const int want = rng.uniform_int(1, 4);
        std::vector<int> cells{start};
        cage[start] = id;
        while (static_cast<int>(cells.size()) < want) {
            std::vector<int> options;
            for (int c : cells) {
                for (int nb : orth(n, n, c)) {
                    if (cage[nb] < 0) options.push_back(nb);
                }
            }
            if (options.empty()) break;
            const int pick = options[rng.below(options.size())];
            cage[pick] = id;
            cells.push_back(pick);
        }
        std::sort(cells.begin(), cells.end());
        Cage k;
        for (int c : cells) {
            k.cells.push_back(out.solution.coord(c));
            k.target += num(out.solution, c);
        }
        out.structures.cages.push_back(std::move(k));
    }
    return out;
}

GeneratedSolution gen_odd_even(int n, Rng& rng) {
    GeneratedSolution out = gen_sudoku(n, rng);
    for (int i = 0; i < n * n; ++i) out.structures.parity.push_back(num(out.solution, i) % 2 == 0 ? 1 : 0);
    return out;
}

GeneratedSolution gen_colored(int n, Rng& rng) {
    GeneratedSolution out{latin(n, rng), {}};
    // Group of a cell holding v in row r is perm_v(r): each group then takes
    // every value exactly once.
    std::vector<std::vector<int>> perm(n, std::vector<int>(n));
    for (auto& p : perm) {
        for (int i = 0; i < n; ++i) p[i] = i;
        rng.shuffle(p);
    }
    out.structures.regions.resize(n * n);
    for (int i = 0; i < n * n; ++i) out.structures.regions[i] = perm[out.solution.at(i).value()][i / n];
    return out;
}

GeneratedSolution gen_jigsaw(int n, Rng& rng) {
    for (int attempt = 0; attempt < 50; ++attempt) {
        Structures s;
        s.regions = jigsaw_regions(n, rng);
        if (auto g = random_fill("jigsaw-sudoku", n, n, s, rng, 20'000)) return {*g, s};
    }
    throw Error(ErrorCode::GenerationFailed, "no fillable jigsaw layout found");
}

GeneratedSolution gen_futoshiki(int n, Rng& rng) {
    GeneratedSolution out{latin(n, rng), {}};
    for (int i = 0; i < n * n; ++i) {
        for (int j : {i % n + 1 < n ? i + 1 : -1, i / n + 1 < n ? i + n : -1}) {
            if (j < 0 || !rng.chance(1, 3)) continue;
            Coord a = out.solution.coord(i), b = out.solution.coord(j);
            if (num(out.solution, i) > num(out.solution, j)) std::swap(a, b);
            out.structures.inequalities.push_back({a, b});
        }
    }
    return out;
}

GeneratedSolution gen_renzoku(int n, Rng& rng) {
    GeneratedSolution out{latin(n, rng), {}};
    for (int i = 0; i < n * n; ++i) {
        for (int j : {i % n + 1 < n ? i + 1 : -1, i / n + 1 < n ? i + n : -1}) {
            if (j >= 0 && std::abs(num(out.solution, i) - num(out.solution, j)) == 1) {
                out.structures.dots.push_back({out.solution.coord(i), out.solution.coord(j)});
            }
        }
    }
    return out;
}

int visible(const Grid& g, const std::vector<int>& line) {
    int seen = 0, tallest = 0;
    for (int i : line) {
        if (num(g, i) > tallest) {
            tallest = num(g, i);
            ++seen;
        }
    }
    return seen;
}

GeneratedSolution gen_skyscraper(int n, Rng& rng) {
    GeneratedSolution out{latin(n, rng), {}};
    Structures& s = out.structures;
    for (int c = 0; c < n; ++c) {
        std::vector<int> line;
        for (int r = 0; r < n; ++r) line.push_back(r * n + c);
        s.top.push_back(visible(out.solution, line));
        std::reverse(line.begin(), line.end());
        s.bottom.push_back(visible(out.solution, line));
    }
    for (int r = 0; r < n; ++r) {
        std::vector<int> line;
        for (int c = 0; c < n; ++c) line.push_back(r * n + c);
        s.left.push_back(visible(out.solution, line));
        std::reverse(line.begin(), line.end());
        s.right.push_back(visible(out.solution, line));
    }
    return out;
}

GeneratedSolution gen_kakuro(int rows, int cols, Rng& rng) {
    const int n = cols;
    for (int attempt = 0; attempt < 100; ++attempt) {
        Grid g(rows, cols);
        bool ok = true;
        for (int i = 0; i < rows * cols && ok; ++i) {
            std::vector<int> options;
            for (int v = 0; v < n; ++v) {
                if (i % cols > 0 && g.at(i - 1).holds(v)) continue;
                if (i >= cols && g.at(i - cols).holds(v)) continue;
                options.push_back(v);
            }
            if (options.empty()) ok = false;
            else g.set(i, CellState::assigned(options[rng.below(options.size())]));
        }
        if (!ok) continue;
        Structures s;
        s.row_clues.assign(rows, 0);
        s.col_clues.assign(cols, 0);
        for (int i = 0; i < rows * cols; ++i) {
            s.row_clues[i / cols] += num(g, i);
            s.col_clues[i % cols] += num(g, i);
        }
        return {g, s};
    }
    throw Error(ErrorCode::GenerationFailed, "could not fill a kakuro grid");
}

GeneratedSolution gen_binairo(int rows, int cols, Rng& rng) {
    return {fill_or_throw("binairo", rows, cols, {}, rng), {}};
}

GeneratedSolution gen_aquarium(int rows, int cols, Rng& rng) {
    std::vector<int> cells(rows * cols);
    for (int i = 0; i < rows * cols; ++i) cells[i] = i;
    rng.shuffle(cells);
    const int count = std::max(2, rng.uniform_int(std::max(rows, cols), rows * cols / 2));
    cells.resize(std::min<int>(count, rows * cols));
    Structures s;
    s.regions = grow_regions(rows, cols, cells, rng);
    std::vector<char> on(rows * cols, 0);
    for (int id = 0; id < count; ++id) {
        std::vector<int> ranks;
        for (int i = 0; i < rows * cols; ++i) {
            if (s.regions[i] == id) ranks.push_back(rows - 1 - i / cols);
        }
        std::sort(ranks.begin(), ranks.end());
        ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
        ranks.insert(ranks.begin(), -1);
        const int level = ranks[rng.below(ranks.size())];
        for (int i = 0; i < rows * cols; ++i) {
            if (s.regions[i] == id && rows - 1 - i / cols <= level) on[i] = 1;
        }
    }
    Grid g = token_grid(rows, cols, on);
    count_lines(g, s, kS);
    return {g, s};
}

std::vector<int> fleet_for(int rows, int cols) {
    switch (std::max(rows, cols)) {
    case 2: return {1};
    case 3: return {2, 1};
    case 4: return {2, 1, 1};
    case 5: return {3, 2, 1, 1};
    case 6: return {3, 2, 2, 1, 1};
    case 7: return {4, 3, 2, 2, 1, 1};
    default: return {4, 3, 3, 2, 2, 1, 1, 1};
    }
}

GeneratedSolution gen_battleships(int rows, int cols, Rng& rng) {
    const auto fleet = fleet_for(rows, cols);
    for (int attempt = 0; attempt < 500; ++attempt) {
        std::vector<char> on(rows * cols, 0);
        bool placed_all = true;
        for (int len : fleet) {
            bool placed = false;
            for (int t = 0; t < 200 && !placed; ++t) {
                const bool across = rng.chance(1, 2);
                const int r = rng.uniform_int(0, across ? rows - 1 : rows - len);
                const int c = rng.uniform_int(0, across ? cols - len : cols - 1);
                if (r < 0 || c < 0) continue;
                std::vector<int> cells;
                for (int k = 0; k < len; ++k) cells.push_back((r + (across ? 0 : k)) * cols + c + (across ? k : 0));
                bool free = true;
                for (int x : cells) {
                    if (on[x]) free = false;
                    for (int nb : ring(rows, cols, x)) {
                        if (on[nb]) free = false;
                    }
                }
                if (!free) continue;
                for (int x : cells) on[x] = 1;
                placed = true;
            }
            if (!placed) {
                placed_all = false;
                break;
            }
        }
        if (!placed_all) continue;
        Structures s;
        s.fleet = fleet;
        Grid g = token_grid(rows, cols, on);
        count_lines(g, s, kS);
        return {g, s};
    }
    throw Error(ErrorCode::GenerationFailed, "could not place the fleet");
}

GeneratedSolution gen_field(int rows, int cols, Rng& rng) {
    std::vector<char> on(rows * cols, 0);
    for (auto& x : on) x = rng.chance(1, 5);
    return {token_grid(rows, cols, on), {}};
}

GeneratedSolution gen_hitori(int n, Rng& rng) {
    Grid values = latin(n, rng);
    std::vector<char> shaded(n * n, 0);
    std::vector<int> order(n * n);
    for (int i = 0; i < n * n; ++i) order[i] = i;
    rng.shuffle(order);
    const int limit = n * n / 4;
    int count = 0;
    std::vector<int> region(n * n, 0);
    for (int i : order) {
        if (count >= limit) break;
        if (!rng.chance(2, 3)) continue;
        bool touching = false;
        for (int nb : orth(n, n, i)) touching = touching || shaded[nb];
        if (touching) continue;
        region[i] = 1;
        if (!connected(n, n, region, 0)) {
            region[i] = 0;
            continue;
        }
        shaded[i] = 1;
        ++count;
    }
    Structures s;
    s.numbers.resize(n * n);
    for (int i = 0; i < n * n; ++i) s.numbers[i] = num(values, i);
    for (int i = 0; i < n * n; ++i) {
        if (!shaded[i]) continue;
        // A shaded cell repeats a number visible in its row or column.
        std::vector<int> options;
        for (int k = 0; k < n; ++k) {
            const int row_cell = (i / n) * n + k;
            const int col_cell = k * n + i % n;
            if (!shaded[row_cell]) options.push_back(s.numbers[row_cell]);
            if (!shaded[col_cell]) options.push_back(s.numbers[col_cell]);
        }
        if (!options.empty()) s.numbers[i] = options[rng.below(options.size())];
    }
    return {token_grid(n, n, shaded), s};
}

GeneratedSolution gen_kakurasu(int rows, int cols, Rng& rng) {
    std::vector<char> on(rows * cols, 0);
    for (auto& x : on) x = rng.chance(1, 2);
    Structures s;
    s.row_clues.assign(rows, 0);
    s.col_clues.assign(cols, 0);
    for (int i = 0; i < rows * cols; ++i) {
        if (!on[i]) continue;
        s.row_clues[i / cols] += i % cols + 1;
        s.col_clues[i % cols] += i / cols + 1;
    }
    return {token_grid(rows, cols, on), s};
}

GeneratedSolution gen_lightup(int rows, int cols, Rng& rng) {
    std::vector<char> wall(rows * cols, 0);
    for (auto& x : wall) x = rng.chance(1, 5);
    if (std::count(wall.begin(), wall.end(), 0) == 0) wall[0] = 0;
    std::vector<char> bulb(rows * cols, 0), lit(rows * cols, 0);
    std::vector<int> order;
    for (int i = 0; i < rows * cols; ++i) {
        if (!wall[i]) order.push_back(i);
    }
    rng.shuffle(order);
    static constexpr int dr[4] = {-1, 1, 0, 0};
    static constexpr int dc[4] = {0, 0, -1, 1};
    for (int i : order) {
        if (lit[i]) continue;
        bulb[i] = lit[i] = 1;
        for (int d = 0; d < 4; ++d) {
            int r = i / cols + dr[d], c = i % cols + dc[d];
            while (r >= 0 && r < rows && c >= 0 && c < cols && !wall[r * cols + c]) {
                lit[r * cols + c] = 1;
                r += dr[d];
                c += dc[d];
            }
        }
    }
    Structures s;
    Grid g(rows, cols);
    for (int i = 0; i < rows * cols; ++i) {
        if (wall[i]) {
            int number = -1;
            if (rng.chance(3, 5)) {
                number = 0;
                for (int nb : orth(rows, cols, i)) number += bulb[nb];
            }
            s.walls.push_back({g.coord(i), number});
            g.set(i, CellState::blocked());
        } else {
            g.set(i, CellState::assigned(bulb[i] ? kS : kE));
        }
    }
    return {g, s};
}

std::vector<int> runs_of(const Grid& g, const std::vector<int>& line) {
    std::vector<int> out;
    int run = 0;
    for (int i : line) {
        if (g.at(i).holds(kS)) {
            ++run;
        } else if (run) {
            out.push_back(run);
            run = 0;
        }
    }
    if (run) out.push_back(run);
    return out;
}

GeneratedSolution gen_nonogram(int rows, int cols, Rng& rng) {
    std::vector<char> on(rows * cols, 0);
    for (auto& x : on) x = rng.chance(11, 20);
    Grid g = token_grid(rows, cols, on);
    Structures s;
    for (int r = 0; r < rows; ++r) {
        std::vector<int> line;
        for (int c = 0; c < cols; ++c) line.push_back(r * cols + c);
        s.row_runs.push_back(runs_of(g, line));
    }
    for (int c = 0; c < cols; ++c) {
        std::vector<int> line;
        for (int r = 0; r < rows; ++r) line.push_back(r * cols + c);
        s.col_runs.push_back(runs_of(g, line));
    }
    return {g, s};
}

bool star_perm(int n, std::vector<int>& p, std::vector<char>& used, Rng& rng) {
    const int r = static_cast<int>(p.size());
    if (r == n) return true;
    std::vector<int> cols(n);
    for (int c = 0; c < n; ++c) cols[c] = c;
    rng.shuffle(cols);
    for (int c : cols) {
        if (used[c] || (r > 0 && std::abs(p.back() - c) < 2)) continue;
        used[c] = 1;
        p.push_back(c);
        if (star_perm(n, p, used, rng)) return true;
        p.pop_back();
        used[c] = 0;
    }
    return false;
}

GeneratedSolution gen_star_battle(int n, Rng& rng) {
    std::vector<int> p;
    std::vector<char> used(n, 0);
    if (!star_perm(n, p, used, rng)) throw Error(ErrorCode::GenerationFailed, "no star placement");
    std::vector<char> on(n * n, 0);
    std::vector<int> seeds;
    for (int r = 0; r < n; ++r) {
        on[r * n + p[r]] = 1;
        seeds.push_back(r * n + p[r]);
    }
    Structures s;
    s.regions = grow_regions(n, n, seeds, rng);
    return {token_grid(n, n, on), s};
}

GeneratedSolution gen_thermometers(int rows, int cols, Rng& rng) {
    std::vector<char> covered(rows * cols, 0);
    std::vector<int> order(rows * cols);
    for (int i = 0; i < rows * cols; ++i) order[i] = i;
    rng.shuffle(order);
    Structures s;
    std::vector<char> on(rows * cols, 0);
    Grid shape(rows, cols);
    for (int start : order) {
        if (covered[start]) continue;
        const int max_len = rng.uniform_int(2, std::max(rows, cols));
        std::vector<int> best;
        const bool across_first = rng.chance(1, 2);
        for (bool across : {across_first, !across_first}) {
            std::vector<int> path{start};
            int r = start / cols, c = start % cols;
            while (static_cast<int>(path.size()) < max_len) {
                across ? ++c : ++r;
                if (r >= rows || c >= cols || covered[r * cols + c]) break;
                path.push_back(r * cols + c);
            }
            if (path.size() > best.size()) best = path;
            if (best.size() >= 2) break;
        }
        if (rng.chance(1, 2)) std::reverse(best.begin(), best.end());
        const int level = rng.uniform_int(0, static_cast<int>(best.size()));
        std::vector<Coord> cells;
        for (std::size_t k = 0; k < best.size(); ++k) {
            covered[best[k]] = 1;
            if (static_cast<int>(k) < level) on[best[k]] = 1;
            cells.push_back(shape.coord(best[k]));
        }
        s.thermometers.push_back(std::move(cells));
    }
    Grid g = token_grid(rows, cols, on);
    count_lines(g, s, kS);
    return {g, s};
}

GeneratedSolution gen_trees(int rows, int cols, Rng& rng) {
    const int want = std::max(1, rows * cols / 5);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<char> tent(rows * cols, 0), tree(rows * cols, 0);
        std::vector<int> order(rows * cols);
        for (int i = 0; i < rows * cols; ++i) order[i] = i;
        rng.shuffle(order);
        int placed = 0;
        for (int i : order) {
            if (placed >= want) break;
            bool clear = true;
            for (int nb : ring(rows, cols, i)) clear = clear && !tent[nb];
            if (!clear) continue;
            tent[i] = 1;
            ++placed;
        }
        std::vector<int> tents;
        for (int i : order) {
            if (tent[i]) tents.push_back(i);
        }
        for (int t : tents) {
            std::vector<int> spots;
            for (int nb : orth(rows, cols, t)) {
                if (!tent[nb] && !tree[nb]) spots.push_back(nb);
            }
            if (spots.empty()) {
                tent[t] = 0;
                continue;
            }
            tree[spots[rng.below(spots.size())]] = 1;
        }
        if (std::count(tent.begin(), tent.end(), 1) == 0) continue;
        Structures s;
        Grid g(rows, cols);
        for (int i = 0; i < rows * cols; ++i) {
            if (tree[i]) {
                s.trees.push_back(g.coord(i));
                g.set(i, CellState::blocked());
            } else {
                g.set(i, CellState::assigned(tent[i] ? kS : kE));
            }
        }
        count_lines(g, s, kS);
        return {g, s};
    }
    throw Error(ErrorCode::GenerationFailed, "could not place trees and tents");
}

std::uint64_t attempt_seed(std::uint64_t seed, int attempt) {
    return attempt == 0 ? seed : mix64(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt)));
}

} // namespace

DifficultyProfile profile_for(const PuzzleDefinition& def, Difficulty level) {
    const int n = def.size_for(level);
    DifficultyProfile p;
    p.level = level;
    p.rows = p.cols = n;
    switch (level) {
    case Difficulty::Easy: p.reveal_min = {1, 4}; p.reveal_max = {3, 4}; break;
    case Difficulty::Medium: p.reveal_min = {1, 4}; p.reveal_max = {1, 2}; break;
    case Difficulty::Hard: p.reveal_min = {3, 20}; p.reveal_max = {2, 5}; break;
    }
    return p;
}

bool ratio_within(int revealed, int total, Ratio lo, Ratio hi) {
    const long long r = revealed, t = total;
    return r * lo.den >= lo.num * t && r * hi.den <= hi.num * t;
}

GeneratedSolution generate_solution(const PuzzleDefinition& def, int rows, int cols, std::uint64_t seed) {
    def.check_size(rows, cols);
    Rng rng(seed);
    const std::string& id = def.id;
    GeneratedSolution out;
    if (id == "aquarium") out = gen_aquarium(rows, cols, rng);
    else if (id == "battle-ships") out = gen_battleships(rows, cols, rng);
    else if (id == "binairo") out = gen_binairo(rows, cols, rng);
    else if (id == "colored-sudoku") out = gen_colored(rows, rng);
    else if (id == "field-explore") out = gen_field(rows, cols, rng);
    else if (id == "futoshiki") out = gen_futoshiki(rows, rng);
    else if (id == "hitori") out = gen_hitori(rows, rng);
    else if (id == "jigsaw-sudoku") out = gen_jigsaw(rows, rng);
    else if (id == "kakurasu") out = gen_kakurasu(rows, cols, rng);
    else if (id == "kakuro") out = gen_kakuro(rows, cols, rng);
    else if (id == "killer-sudoku") out = gen_killer(rows, rng);
    else if (id == "light-up") out = gen_lightup(rows, cols, rng);
    else if (id == "nonogram") out = gen_nonogram(rows, cols, rng);
    else if (id == "odd-even-sudoku") out = gen_odd_even(rows, rng);
    else if (id == "renzoku") out = gen_renzoku(rows, rng);
    else if (id == "skyscraper") out = gen_skyscraper(rows, rng);
    else if (id == "star-battle") out = gen_star_battle(rows, rng);
    else if (id == "sudoku") out = gen_sudoku(rows, rng);
    else if (id == "thermometers") out = gen_thermometers(rows, cols, rng);
    else if (id == "trees-and-tents") out = gen_trees(rows, cols, rng);
    else throw Error(ErrorCode::NotRegistered, "no generator for " + id);
    return out;
}

PuzzleInstance reveal_clues(const PuzzleDefinition& def, const GeneratedSolution& generated,
                            const DifficultyProfile& profile, std::uint64_t seed, const GeneratorOptions& options) {
    Rng rng(mix64(seed ^ 0x72657665616cULL));
    const Grid& sol = generated.solution;
    Structures s = generated.structures;
    std::vector<Condition> conds;
    std::vector<int> picked;
    if (def.reveal_based) {
        std::vector<int> open;
        for (int i = 0; i < sol.size(); ++i) {
            if (!sol.at(i).is_blocked()) open.push_back(i);
        }
        const long long n = static_cast<long long>(open.size());
        const long long lo = (n * profile.reveal_min.num + profile.reveal_min.den - 1) / profile.reveal_min.den;
        const long long hi = n * profile.reveal_max.num / profile.reveal_max.den;
        const int k = options.reveal_all ? static_cast<int>(n) : rng.uniform_int(static_cast<int>(lo), static_cast<int>(hi));
        rng.shuffle(open);
        picked.assign(open.begin(), open.begin() + k);
    } else if (def.id == "field-explore") {
        std::vector<int> safe;
        for (int i = 0; i < sol.size(); ++i) {
            if (sol.at(i).holds(kE)) safe.push_back(i);
        }
        const Ratio f = options.field_reveal;
        const int k = static_cast<int>((static_cast<long long>(safe.size()) * f.num + f.den / 2) / f.den);
        rng.shuffle(safe);
        safe.resize(std::min<std::size_t>(safe.size(), k));
        std::sort(safe.begin(), safe.end());
        for (int i : safe) {
            int mines = 0;
            for (int nb : ring(sol.rows(), sol.cols(), i)) mines += sol.at(nb).holds(kS);
            s.revealed.push_back({sol.coord(i), mines});
        }
        picked = safe;
    } else if (def.id == "skyscraper") {
        // Clue density: each side clue survives with a level-dependent chance.
        const auto [keep, of] = profile.level == Difficulty::Easy     ? std::pair{4, 5}
                                : profile.level == Difficulty::Medium ? std::pair{2, 3}
                                                                      : std::pair{3, 5};
        for (auto* side : {&s.top, &s.bottom, &s.left, &s.right}) {
            for (int& clue : *side) {
                if (!rng.chance(keep, of)) clue = 0;
            }
        }
    } else if (def.id == "battle-ships") {
        // A few hint cells, at most one per eight.
        std::vector<int> all(sol.size());
        for (int i = 0; i < sol.size(); ++i) all[i] = i;
        rng.shuffle(all);
        picked.assign(all.begin(), all.begin() + rng.uniform_int(0, sol.size() / 8));
    }
    std::sort(picked.begin(), picked.end());
    const Alphabet alphabet = def.alphabet(sol.rows(), sol.cols());
    for (int i : picked) conds.push_back({sol.coord(i), alphabet.symbol(sol.at(i).value())});
    return PuzzleInstance(def.id, sol.rows(), sol.cols(), std::move(s), std::move(conds), sol, seed, profile.level);
}

GeneratedInstance generate_instance(const std::string& puzzle, Difficulty level, std::uint64_t seed,
                                    const GeneratorOptions& options) {
    const PuzzleDefinition& def = lookup(puzzle);
    DifficultyProfile profile = profile_for(def, level);
    if (options.size) {
        profile.rows = options.size->first;
        profile.cols = options.size->second;
    }
    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        const std::uint64_t sub = attempt_seed(seed, attempt);
        GeneratedSolution gen;
        try {
            gen = generate_solution(def, profile.rows, profile.cols, sub);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::GenerationFailed) throw;
            last_failure = e.what();
            continue;
        }
        PuzzleInstance inst = reveal_clues(def, gen, profile, sub, options);
        SolveResult r = solve(inst, options.limits);
        const auto* solved = std::get_if<Solved>(&r);
        if (!solved) {
            last_failure = "solver budget exceeded";
            continue;
        }
        if (options.require_unique) {
            CountResult c = count_solutions(inst, 2, options.limits);
            if (c.budget_exceeded || c.count != 1) {
                last_failure = "instance not unique";
                continue;
            }
        }
        return {std::move(inst), solved->nodes};
    }
    throw Error(ErrorCode::GenerationFailed, puzzle + ": retry budget exhausted (" + last_failure + ")");
}

std::vector<DatasetResult> build_dataset(const DatasetConfig& config) {
    if (config.count < 1) throw Error(ErrorCode::InvalidArgument, "count must be at least 1");
    if (config.train.den <= 0 || config.train.num < 0 || config.train.num > config.train.den) {
        throw Error(ErrorCode::InvalidArgument, "train ratio must lie in [0, 1]");
    }
    const int jobs = std::max(1, config.jobs);
    int quota_train = static_cast<int>(
        (static_cast<long long>(config.count) * config.train.num + config.train.den / 2) / config.train.den);
    if (config.count >= 2) quota_train = std::clamp(quota_train, 1, config.count - 1);
    const int quota[2] = {quota_train, config.count - quota_train};
    static const char* const split_names[2] = {"train", "test"};

    std::vector<DatasetResult> results;
    for (const std::string& puzzle : config.puzzles) {
        lookup(puzzle);
        const std::uint64_t base =
            mix64(config.seed ^ fnv1a64(puzzle) ^ (static_cast<std::uint64_t>(config.difficulty) << 56));
        DatasetResult result{{puzzle, config.difficulty, {}, {}}, {}};
        std::unordered_set<std::string> seen_conditions;
        // Every solution lives in exactly one split, so splits share neither
        // conditions nor solutions.
        std::unordered_map<std::string, int> solution_split;
        std::vector<ManifestEntry> entries[2];
        std::vector<PuzzleInstance> instances[2];
        int streak = 0;
        std::uint64_t next = 0;
        auto filled = [&] { return static_cast<int>(entries[0].size() + entries[1].size()); };
        while (filled() < config.count) {
            // Generate a batch in parallel, then dedup in draw order so the
            // outcome does not depend on the number of workers.
            const int batch = jobs == 1 ? 1 : jobs * 4;
            std::vector<std::optional<GeneratedInstance>> slots(batch);
            std::vector<std::string> errors(batch);
            std::atomic<int> cursor{0};
            auto work = [&] {
                for (int k = cursor++; k < batch; k = cursor++) {
                    try {
                        slots[k] = generate_instance(puzzle, config.difficulty, mix64(base + next + k), config.options);
                    } catch (const std::exception& e) {
                        errors[k] = e.what();
                    }
                }
            };
            if (jobs == 1) {
                work();
            } else {
                std::vector<std::thread> pool;
                for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
                for (auto& t : pool) t.join();
            }
            for (int k = 0; k < batch && filled() < config.count; ++k) {
                if (!slots[k]) throw Error(ErrorCode::GenerationFailed, errors[k]);
                const PuzzleInstance& inst = slots[k]->instance;
                const std::string ch = conditions_hash(inst);
                const std::string sh = solution_hash(inst);
                int split = -1;
                if (!seen_conditions.count(ch)) {
                    if (auto it = solution_split.find(sh); it != solution_split.end()) {
                        if (static_cast<int>(entries[it->second].size()) < quota[it->second]) split = it->second;
                    } else {
                        // New solution: the split that is proportionally emptier.
                        const long long f0 = static_cast<long long>(entries[0].size()) * quota[1];
                        const long long f1 = static_cast<long long>(entries[1].size()) * quota[0];
                        split = quota[1] == 0 || (quota[0] > 0 && f0 <= f1) ? 0 : 1;
                        if (static_cast<int>(entries[split].size()) >= quota[split]) split = 1 - split;
                        solution_split[sh] = split;
                    }
                }
                if (split < 0) {
                    if (++streak >= config.exhaustion_streak) {
                        throw Error(ErrorCode::DuplicateExhaustion,
                                    puzzle + ": " + std::to_string(streak) + " consecutive duplicates after " +
                                        std::to_string(filled()) + " distinct instances (requested " +
                                        std::to_string(config.count) + ")");
                    }
                    continue;
                }
                streak = 0;
                seen_conditions.insert(ch);
                ManifestEntry e;
                e.instance_hash = instance_hash(inst);
                e.split = split_names[split];
                e.path = puzzle + "/" + std::string(to_string(config.difficulty)) + "/" + e.split + "/" +
                         e.instance_hash + ".json";
                e.seed = mix64(base + next + k);
                e.conditions_hash = ch;
                e.solution_hash = sh;
                e.solver_nodes = slots[k]->solver_nodes;
                entries[split].push_back(std::move(e));
                instances[split].push_back(inst);
            }
            next += batch;
        }
        for (int split = 0; split < 2; ++split) {
            for (std::size_t k = 0; k < entries[split].size(); ++k) {
                if (!config.out.empty()) save_instance(instances[split][k], config.out / entries[split][k].path);
                ++result.manifest.counts[entries[split][k].split];
                result.manifest.entries.push_back(std::move(entries[split][k]));
                result.instances.push_back(std::move(instances[split][k]));
            }
        }
        if (!config.out.empty()) {
            write_file(config.out / puzzle / std::string(to_string(config.difficulty)) / "manifest.json",
                       manifest_to_json(result.manifest).dump(2) + "\n");
        }
        results.push_back(std::move(result));
    }
    return results;
}

ojson manifest_to_json(const DatasetManifest& manifest) {
    ojson j;
    j["puzzle"] = manifest.puzzle;
    j["difficulty"] = std::string(to_string(manifest.difficulty));
    ojson counts = ojson::object();
    for (const auto& [split, n] : manifest.counts) counts[split] = n;
    j["counts"] = counts;
    ojson entries = ojson::array();
    for (const auto& e : manifest.entries) {
        entries.push_back({{"instance_hash", e.instance_hash},
                           {"path", e.path},
                           {"split", e.split},
                           {"seed", e.seed},
                           {"conditions_hash", e.conditions_hash},
                           {"solution_hash", e.solution_hash},
                           {"solver_nodes", e.solver_nodes}});
    }
    j["entries"] = entries;
    return j;
}

} // namespace gridforge
