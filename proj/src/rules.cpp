#include "gridforge/rules.hpp"

#include <algorithm>
#include <set>

#include "rule_text.hpp"

namespace gridforge {

namespace {

constexpr int kShaded = 0;  // "s" / "tt" are index 0 of their alphabets
constexpr int kEmpty = 1;

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::Schema, what);
}

std::string cell_label(Coord c) { return to_string(c); }

std::vector<int> row_scope(int rows, int cols, int r) {
    (void)rows;
    std::vector<int> out(cols);
    for (int c = 0; c < cols; ++c) out[c] = r * cols + c;
    return out;
}

std::vector<int> col_scope(int rows, int cols, int c) {
    std::vector<int> out(rows);
    for (int r = 0; r < rows; ++r) out[r] = r * cols + c;
    return out;
}

std::vector<int> all_cells(int rows, int cols) {
    std::vector<int> out(rows * cols);
    for (int i = 0; i < rows * cols; ++i) out[i] = i;
    return out;
}

int cell_index(int rows, int cols, Coord c) {
    require(c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols,
            "structure cell " + to_string(c) + " outside the grid");
    return c.row * cols + c.col;
}

void add_lines_all_different(std::vector<Constraint>& out, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        out.push_back({"row " + std::to_string(r), row_scope(rows, cols, r), params::AllDifferent{}});
    }
    for (int c = 0; c < cols; ++c) {
        out.push_back({"column " + std::to_string(c), col_scope(rows, cols, c), params::AllDifferent{}});
    }
}

void add_blocks(std::vector<Constraint>& out, int n) {
    int b = 1;
    while (b * b < n) ++b;
    for (int br = 0; br < n / b; ++br) {
        for (int bc = 0; bc < n / b; ++bc) {
            std::vector<int> scope;
            for (int r = br * b; r < br * b + b; ++r) {
                for (int c = bc * b; c < bc * b + b; ++c) scope.push_back(r * n + c);
            }
            out.push_back({"block " + std::to_string(br * (n / b) + bc), scope, params::AllDifferent{}});
        }
    }
}

std::vector<std::vector<int>> region_scopes(int rows, int cols, const Structures& s) {
    require(static_cast<int>(s.regions.size()) == rows * cols, "regions must cover every cell");
    int count = 0;
    for (int id : s.regions) {
        require(id >= 0, "region ids must be non-negative");
        count = std::max(count, id + 1);
    }
    std::vector<std::vector<int>> out(count);
    for (int i = 0; i < rows * cols; ++i) out[s.regions[i]].push_back(i);
    return out;
}

void add_line_counts(std::vector<Constraint>& out, int rows, int cols, const Structures& s,
                     int symbol) {
    require(static_cast<int>(s.row_clues.size()) == rows, "one row clue per row");
    require(static_cast<int>(s.col_clues.size()) == cols, "one column clue per column");
    for (int r = 0; r < rows; ++r) {
        out.push_back({"row " + std::to_string(r) + " count", row_scope(rows, cols, r),
                       params::LineCount{symbol, s.row_clues[r]}});
    }
    for (int c = 0; c < cols; ++c) {
        out.push_back({"column " + std::to_string(c) + " count", col_scope(rows, cols, c),
                       params::LineCount{symbol, s.col_clues[c]}});
    }
}

std::vector<Constraint> build_aquarium(int rows, int cols, const Structures& s) {
    std::vector<Constraint> out;
    const auto regions = region_scopes(rows, cols, s);
    for (std::size_t k = 0; k < regions.size(); ++k) {
        if (regions[k].empty()) continue;
        params::GravityFill p{{}, kShaded};
        for (int i : regions[k]) p.ranks.push_back(rows - 1 - i / cols);
        out.push_back({"aquarium " + std::to_string(k), regions[k], p});
    }
    add_line_counts(out, rows, cols, s, kShaded);
    return out;
}

std::vector<Constraint> build_battleships(int rows, int cols, const Structures& s) {
    require(!s.fleet.empty(), "fleet must list at least one ship");
    for (int len : s.fleet) require(len >= 1 && len <= std::max(rows, cols), "ship length out of range");
    std::vector<Constraint> out;
    add_line_counts(out, rows, cols, s, kShaded);
    out.push_back({"fleet", all_cells(rows, cols), params::FleetComposition{s.fleet, kShaded}});
    out.push_back({"ships apart", all_cells(rows, cols),
                   params::NoTouch{Neighborhood::DiagonalOnly, kShaded}});
    return out;
}

std::vector<Constraint> build_binairo(int rows, int cols, const Structures&) {
    std::vector<Constraint> out;
    for (int r = 0; r < rows; ++r) {
        out.push_back({"row " + std::to_string(r), row_scope(rows, cols, r), params::MaxRunLength{2}});
    }
    for (int c = 0; c < cols; ++c) {
        out.push_back({"column " + std::to_string(c), col_scope(rows, cols, c), params::MaxRunLength{2}});
    }
    return out;
}

std::vector<Constraint> build_region_latin(int rows, int cols, const Structures& s,
                                           const std::string& noun) {
    std::vector<Constraint> out;
    add_lines_all_different(out, rows, cols);
    const auto regions = region_scopes(rows, cols, s);
    require(static_cast<int>(regions.size()) == cols, "need exactly N " + noun + "s");
    for (std::size_t k = 0; k < regions.size(); ++k) {
        require(static_cast<int>(regions[k].size()) == cols, noun + " sizes must equal N");
        out.push_back({noun + " " + std::to_string(k), regions[k], params::AllDifferent{}});
    }
    return out;
}

std::vector<Constraint> build_colored(int rows, int cols, const Structures& s) {
    return build_region_latin(rows, cols, s, "color");
}

std::vector<Constraint> build_jigsaw(int rows, int cols, const Structures& s) {
    return build_region_latin(rows, cols, s, "region");
}

std::vector<Constraint> build_field(int rows, int cols, const Structures& s) {
    std::vector<Constraint> out;
    Grid shape(rows, cols);
    std::set<int> seen;
    for (const Revealed& rv : s.revealed) {
        const int center = cell_index(rows, cols, rv.cell);
        require(seen.insert(center).second, "revealed cells must be distinct");
        require(rv.number >= 0 && rv.number <= 8, "revealed count out of range");
        out.push_back({"count at " + cell_label(rv.cell),
                       neighbours(shape, center, Neighborhood::IncludingDiagonal),
                       params::NeighborMineCount{center, kShaded, rv.number}});
    }
    return out;
}

std::vector<Constraint> build_futoshiki(int rows, int cols, const Structures& s) {
    std::vector<Constraint> out;
    add_lines_all_different(out, rows, cols);
    Grid shape(rows, cols);
    for (const Edge& e : s.inequalities) {
        const int a = cell_index(rows, cols, e.a);
        const int b = cell_index(rows, cols, e.b);
        const auto adj = neighbours(shape, a, Neighborhood::Orthogonal);
        require(std::find(adj.begin(), adj.end(), b) != adj.end(), "inequality cells must be adjacent");
        out.push_back({cell_label(e.a) + " < " + cell_label(e.b), {a, b},
                       params::InequalityEdge{1, cols}});
    }
    return out;
}

std::vector<Constraint> build_hitori(int rows, int cols, const Structures& s) {
    require(static_cast<int>(s.numbers.size()) == rows * cols, "hitori needs a number per cell");
    std::vector<Constraint> out;
    for (int r = 0; r < rows; ++r) {
        params::AllDifferent p{{}, kEmpty};
        auto scope = row_scope(rows, cols, r);
        for (int i : scope) p.keys.push_back(s.numbers[i]);
        out.push_back({"row " + std::to_string(r), scope, p});
    }
    for (int c = 0; c < cols; ++c) {
        params::AllDifferent p{{}, kEmpty};
        auto scope = col_scope(rows, cols, c);
        for (int i : scope) p.keys.push_back(s.numbers[i]);
        out.push_back({"column " + std::to_string(c), scope, p});
    }
    out.push_back({"shaded apart", all_cells(rows, cols), params::NoTouch{Neighborhood::Orthogonal, kShaded}});
    out.push_back({"unshaded connected", all_cells(rows, cols), params::Connectivity{kShaded}});
    return out;
}

std::vector<Constraint> build_kakurasu(int rows, int cols, const Structures& s) {
    require(static_cast<int>(s.row_clues.size()) == rows, "one row clue per row");
    require(static_cast<int>(s.col_clues.size()) == cols, "one column clue per column");
    std::vector<Constraint> out;
    for (int r = 0; r < rows; ++r) {
        params::WeightedLineSum p{{}, kShaded, s.row_clues[r]};
        for (int c = 1; c <= cols; ++c) p.weights.push_back(c);
        out.push_back({"row " + std::to_string(r) + " sum", row_scope(rows, cols, r), p});
    }
    for (int c = 0; c < cols; ++c) {
        params::WeightedLineSum p{{}, kShaded, s.col_clues[c]};
        for (int r = 1; r <= rows; ++r) p.weights.push_back(r);
        out.push_back({"column " + std::to_string(c) + " sum", col_scope(rows, cols, c), p});
    }
    return out;
}

void add_adjacent_not_equal(std::vector<Constraint>& out, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                out.push_back({cell_label({r, c}) + " != " + cell_label({r, c + 1}),
                               {r * cols + c, r * cols + c + 1}, params::AdjacentNotEqual{}});
            }
            if (r + 1 < rows) {
                out.push_back({cell_label({r, c}) + " != " + cell_label({r + 1, c}),
                               {r * cols + c, (r + 1) * cols + c}, params::AdjacentNotEqual{}});
            }
        }
    }
}

std::vector<Constraint> build_kakuro(int rows, int cols, const Structures& s) {
    require(static_cast<int>(s.row_clues.size()) == rows, "one row sum per row");
    require(static_cast<int>(s.col_clues.size()) == cols, "one column sum per column");
    std::vector<Constraint> out;
    for (int r = 0; r < rows; ++r) {
        out.push_back({"row " + std::to_string(r) + " sum", row_scope(rows, cols, r),
                       params::LineSum{s.row_clues[r], 1, cols}});
    }
    for (int c = 0; c < cols; ++c) {
        out.push_back({"column " + std::to_string(c) + " sum", col_scope(rows, cols, c),
                       params::LineSum{s.col_clues[c], 1, cols}});
    }
    add_adjacent_not_equal(out, rows, cols);
    return out;
}

std::vector<Constraint> build_killer(int rows, int cols, const Structures& s) {
    std::vector<Constraint> out;
    add_lines_all_different(out, rows, cols);
    add_blocks(out, cols);
    std::set<int> covered;
    for (std::size_t k = 0; k < s.cages.size(); ++k) {
        std::vector<int> scope;
        for (Coord c : s.cages[k].cells) {
            const int i = cell_index(rows, cols, c);
            require(covered.insert(i).second, "cages must not overlap");
            scope.push_back(i);
        }
        require(!scope.empty(), "cage without cells");
        out.push_back({"cage " + std::to_string(k), scope, params::LineSum{s.cages[k].target, 1, cols}});
    }
    return out;
}

std::vector<Constraint> build_lightup(int rows, int cols, const Structures& s) {
    std::vector<char> wall(rows * cols, 0);
    for (const Wall& w : s.walls) {
        const int i = cell_index(rows, cols, w.cell);
        require(!wall[i], "walls must be distinct");
        require(w.number >= -1 && w.number <= 4, "wall number out of range");
        wall[i] = 1;
    }
    std::vector<int> open;
    for (int i = 0; i < rows * cols; ++i) {
        if (!wall[i]) open.push_back(i);
    }
    std::vector<Constraint> out;
    out.push_back({"illumination", open, params::Illumination{kShaded}});
    Grid shape(rows, cols);
    for (const Wall& w : s.walls) {
        if (w.number < 0) continue;
        const int center = shape.index(w.cell);
        std::vector<int> scope;
        for (int n : neighbours(shape, center, Neighborhood::Orthogonal)) {
            if (!wall[n]) scope.push_back(n);
        }
        out.push_back({"wall at " + cell_label(w.cell), scope,
                       params::AdjacencyCount{center, kShaded, w.number}});
    }
    return out;
}

std::vector<Constraint> build_nonogram(int rows, int cols, const Structures& s) {
    require(static_cast<int>(s.row_runs.size()) == rows, "one run clue per row");
    require(static_cast<int>(s.col_runs.size()) == cols, "one run clue per column");
    auto check_runs = [](const std::vector<int>& runs, int length) {
        int need = 0;
        for (int r : runs) {
            require(r >= 1, "run lengths must be positive");
            need += r;
        }
        if (!runs.empty()) need += static_cast<int>(runs.size()) - 1;
        require(need <= length, "run clue does not fit its line");
    };
    std::vector<Constraint> out;
    for (int r = 0; r < rows; ++r) {
        check_runs(s.row_runs[r], cols);
        out.push_back({"row " + std::to_string(r) + " runs", row_scope(rows, cols, r),
                       params::RunLengths{s.row_runs[r], kShaded}});
    }
    for (int c = 0; c < cols; ++c) {
        check_runs(s.col_runs[c], rows);
        out.push_back({"column " + std::to_string(c) + " runs", col_scope(rows, cols, c),
                       params::RunLengths{s.col_runs[c], kShaded}});
    }
    return out;
}

std::vector<Constraint> build_odd_even(int rows, int cols, const Structures& s) {
    require(static_cast<int>(s.parity.size()) == rows * cols, "parity needs an entry per cell");
    std::vector<Constraint> out;
    add_lines_all_different(out, rows, cols);
    add_blocks(out, cols);
    for (int i = 0; i < rows * cols; ++i) {
        if (s.parity[i] < 0) continue;
        require(s.parity[i] <= 1, "parity entries are -1, 0 (odd) or 1 (even)");
        out.push_back({(s.parity[i] ? "even " : "odd ") + cell_label({i / cols, i % cols}), {i},
                       params::ParityMask{s.parity[i] == 1}});
    }
    return out;
}

std::vector<Constraint> build_renzoku(int rows, int cols, const Structures& s) {
    std::vector<Constraint> out;
    add_lines_all_different(out, rows, cols);
    std::set<std::pair<int, int>> dots;
    Grid shape(rows, cols);
    for (const Edge& e : s.dots) {
        int a = cell_index(rows, cols, e.a);
        int b = cell_index(rows, cols, e.b);
        const auto adj = neighbours(shape, a, Neighborhood::Orthogonal);
        require(std::find(adj.begin(), adj.end(), b) != adj.end(), "dot cells must be adjacent");
        dots.insert({std::min(a, b), std::max(a, b)});
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int a = r * cols + c;
            for (int b : {c + 1 < cols ? a + 1 : -1, r + 1 < rows ? a + cols : -1}) {
                if (b < 0) continue;
                const bool dot = dots.count({a, b}) > 0;
                out.push_back({cell_label(shape.coord(a)) + (dot ? " dot " : " plain ") +
                                   cell_label(shape.coord(b)),
                               {a, b}, params::ConsecutiveEdge{dot}});
            }
        }
    }
    return out;
}

std::vector<Constraint> build_skyscraper(int rows, int cols, const Structures& s) {
    require(static_cast<int>(s.top.size()) == cols && static_cast<int>(s.bottom.size()) == cols,
            "top and bottom clues need one entry per column");
    require(static_cast<int>(s.left.size()) == rows && static_cast<int>(s.right.size()) == rows,
            "left and right clues need one entry per row");
    std::vector<Constraint> out;
    add_lines_all_different(out, rows, cols);
    auto add = [&](const std::string& label, std::vector<int> scope, int clue) {
        if (clue <= 0) return;  // no clue on this side
        out.push_back({label, std::move(scope), params::Visibility{clue, cols}});
    };
    for (int c = 0; c < cols; ++c) {
        auto down = col_scope(rows, cols, c);
        add("top " + std::to_string(c), down, s.top[c]);
        std::reverse(down.begin(), down.end());
        add("bottom " + std::to_string(c), down, s.bottom[c]);
    }
    for (int r = 0; r < rows; ++r) {
        auto across = row_scope(rows, cols, r);
        add("left " + std::to_string(r), across, s.left[r]);
        std::reverse(across.begin(), across.end());
        add("right " + std::to_string(r), across, s.right[r]);
    }
    return out;
}

std::vector<Constraint> build_star_battle(int rows, int cols, const Structures& s) {
    std::vector<Constraint> out;
    for (int r = 0; r < rows; ++r) {
        out.push_back({"row " + std::to_string(r), row_scope(rows, cols, r), params::LineCount{kShaded, 1}});
    }
    for (int c = 0; c < cols; ++c) {
        out.push_back({"column " + std::to_string(c), col_scope(rows, cols, c), params::LineCount{kShaded, 1}});
    }
    const auto regions = region_scopes(rows, cols, s);
    require(static_cast<int>(regions.size()) == rows, "star battle needs one region per row");
    for (std::size_t k = 0; k < regions.size(); ++k) {
        require(!regions[k].empty(), "empty region");
        out.push_back({"region " + std::to_string(k), regions[k], params::LineCount{kShaded, 1}});
    }
    out.push_back({"stars apart", all_cells(rows, cols),
                   params::NoTouch{Neighborhood::IncludingDiagonal, kShaded}});
    return out;
}

std::vector<Constraint> build_sudoku(int rows, int cols, const Structures&) {
    std::vector<Constraint> out;
    add_lines_all_different(out, rows, cols);
    add_blocks(out, cols);
    return out;
}

std::vector<Constraint> build_thermometers(int rows, int cols, const Structures& s) {
    std::vector<Constraint> out;
    std::set<int> covered;
    for (std::size_t k = 0; k < s.thermometers.size(); ++k) {
        const auto& path = s.thermometers[k];
        require(!path.empty(), "thermometer without cells");
        params::GravityFill p{{}, kShaded};
        std::vector<int> scope;
        for (std::size_t j = 0; j < path.size(); ++j) {
            const int i = cell_index(rows, cols, path[j]);
            require(covered.insert(i).second, "thermometers must not overlap");
            if (j > 0) {
                require(std::abs(path[j].row - path[j - 1].row) + std::abs(path[j].col - path[j - 1].col) == 1,
                        "thermometer cells must be consecutive neighbours");
            }
            scope.push_back(i);
            p.ranks.push_back(static_cast<int>(j));
        }
        out.push_back({"thermometer " + std::to_string(k), scope, p});
    }
    add_line_counts(out, rows, cols, s, kShaded);
    return out;
}

std::vector<Constraint> build_trees(int rows, int cols, const Structures& s) {
    std::vector<char> tree(rows * cols, 0);
    params::Bijection bij{{}, kShaded};
    for (Coord t : s.trees) {
        const int i = cell_index(rows, cols, t);
        require(!tree[i], "trees must be distinct");
        tree[i] = 1;
        bij.trees.push_back(i);
    }
    std::vector<int> open;
    for (int i = 0; i < rows * cols; ++i) {
        if (!tree[i]) open.push_back(i);
    }
    std::vector<Constraint> out;
    out.push_back({"trees and tents", open, bij});
    out.push_back({"tents apart", open, params::NoTouch{Neighborhood::IncludingDiagonal, kShaded}});
    add_line_counts(out, rows, cols, s, kShaded);
    return out;
}

void square_sized(const PuzzleDefinition& def, int rows, int cols) {
    if (rows != cols || rows < 2 || rows > 9) {
        throw Error(ErrorCode::IllegalSize,
                    def.id + " needs a square N x N grid with 2 <= N <= 9, got " +
                        std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void block_sized(const PuzzleDefinition& def, int rows, int cols) {
    if (rows != cols || (rows != 4 && rows != 9)) {
        throw Error(ErrorCode::IllegalSize,
                    def.id + " needs sqrt(N)xsqrt(N) blocks, so N is 4 or 9 (the next size, 16x16, is "
                             "too large); got " +
                        std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void star_sized(const PuzzleDefinition& def, int rows, int cols) {
    if (rows != cols || rows < 4 || rows > 16) {
        throw Error(ErrorCode::IllegalSize,
                    def.id + " needs a square grid of side 4..16 (one star per row without touching), got " +
                        std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void any_sized(const PuzzleDefinition& def, int rows, int cols) {
    if (rows < 2 || cols < 2 || rows > 16 || cols > 16) {
        throw Error(ErrorCode::IllegalSize, def.id + " supports 2..16 rows and columns, got " +
                                                std::to_string(rows) + "x" + std::to_string(cols));
    }
}

const std::vector<std::string> kSelect = {"s", "e"};

std::vector<PuzzleDefinition> build_registry() {
    using T = Tag;
    std::vector<PuzzleDefinition> defs = {
        {"aquarium", {T::Counting, T::Unidirectionality}, kSelect, "", false, {4, 6, 8},
         {"regions", "row_clues", "col_clues"}, "", {}, "s", any_sized, build_aquarium},
        {"battle-ships", {T::Counting, T::Connectivity}, kSelect, "", false, {4, 6, 8},
         {"row_clues", "col_clues", "fleet"}, "", {}, "s", any_sized, build_battleships},
        {"binairo", {T::Counting}, {"w", "b"}, "", true, {4, 6, 8}, {}, "", {}, "b", any_sized,
         build_binairo},
        {"colored-sudoku", {T::Uniqueness, T::Counting}, {}, "", true, {4, 6, 8}, {"regions"}, "", {}, "",
         square_sized, build_colored},
        {"field-explore", {T::Counting}, kSelect, "", false, {4, 6, 8}, {"revealed"}, "", {}, "s",
         any_sized, build_field},
        {"futoshiki", {T::Uniqueness, T::Comparison}, {}, "", true, {4, 6, 8}, {"inequalities"}, "", {},
         "", square_sized, build_futoshiki},
        {"hitori", {T::Uniqueness, T::Connectivity}, kSelect, "", false, {4, 6, 8}, {"numbers"}, "", {},
         "s", square_sized, build_hitori},
        {"jigsaw-sudoku", {T::Uniqueness, T::Counting}, {}, "", true, {4, 6, 8}, {"regions"}, "", {}, "",
         square_sized, build_jigsaw},
        {"kakurasu", {T::Arithmetic, T::Counting}, kSelect, "", false, {4, 6, 8},
         {"row_clues", "col_clues"}, "", {}, "s", any_sized, build_kakurasu},
        {"kakuro", {T::Arithmetic, T::Counting}, {}, "", true, {4, 6, 8}, {"row_clues", "col_clues"}, "",
         {}, "", square_sized, build_kakuro},
        {"killer-sudoku", {T::Uniqueness, T::Arithmetic}, {}, "", true, {4, 9, 0}, {"cages"}, "", {}, "",
         block_sized, build_killer},
        {"light-up", {T::Counting}, kSelect, "w", false, {4, 6, 8}, {"walls"}, "", {}, "s", any_sized,
         build_lightup},
        {"nonogram", {T::Counting, T::Connectivity}, kSelect, "", false, {4, 6, 8},
         {"row_runs", "col_runs"}, "", {}, "s", any_sized, build_nonogram},
        {"odd-even-sudoku", {T::Uniqueness, T::Counting}, {}, "", true, {4, 9, 0}, {"parity"}, "", {}, "",
         block_sized, build_odd_even},
        {"renzoku", {T::Uniqueness, T::Arithmetic, T::Comparison}, {}, "", true, {4, 6, 8}, {"dots"}, "",
         {}, "", square_sized, build_renzoku},
        {"skyscraper", {T::Uniqueness, T::Comparison, T::Counting}, {}, "", false, {4, 6, 8},
         {"top", "bottom", "left", "right"}, "", {}, "", square_sized, build_skyscraper},
        {"star-battle", {T::Counting}, kSelect, "", false, {4, 6, 8}, {"regions"}, "", {}, "s", star_sized,
         build_star_battle},
        {"sudoku", {T::Uniqueness, T::Counting}, {}, "", true, {4, 9, 0}, {}, "", {}, "", block_sized,
         build_sudoku},
        {"thermometers", {T::Counting, T::Unidirectionality}, kSelect, "", false, {4, 6, 8},
         {"thermometers", "row_clues", "col_clues"}, "", {}, "s", any_sized, build_thermometers},
        {"trees-and-tents", {T::Matching, T::Counting}, {"tt", "e"}, "tr", false, {6, 8, 10},
         {"trees", "row_clues", "col_clues"}, "", {}, "tt", any_sized, build_trees},
    };
    for (auto& def : defs) {
        const auto& texts = detail::rule_texts();
        auto it = std::find_if(texts.begin(), texts.end(),
                               [&](const detail::RuleText& t) { return t.id == def.id; });
        def.rule_prompt = it->rule;
        def.templates = {it->cell_at, it->direct_solution, it->valid_action, it->cot_solution};
    }
    return defs;
}

} // namespace

std::string_view to_string(Tag tag) {
    switch (tag) {
    case Tag::Counting: return "counting";
    case Tag::Arithmetic: return "arithmetic";
    case Tag::Comparison: return "comparison";
    case Tag::Matching: return "matching";
    case Tag::Unidirectionality: return "unidirectionality";
    case Tag::Connectivity: return "connectivity";
    case Tag::Uniqueness: return "uniqueness";
    }
    return "unknown";
}

Alphabet PuzzleDefinition::alphabet(int rows, int cols) const {
    (void)rows;
    if (numeric()) return Alphabet::numbers(cols);
    return Alphabet(symbols, false);
}

void PuzzleDefinition::check_size(int rows, int cols) const { size_check(*this, rows, cols); }

int PuzzleDefinition::size_for(Difficulty d) const {
    const int n = sizes[static_cast<int>(d)];
    if (n == 0) {
        throw Error(ErrorCode::IllegalSize,
                    id + " has no " + std::string(to_string(d)) + " level: no legal grid size fits it");
    }
    return n;
}

std::vector<Constraint> PuzzleDefinition::instantiate(int rows, int cols, const Structures& s) const {
    check_size(rows, cols);
    return builder(rows, cols, s);
}

std::vector<int> PuzzleDefinition::blocked_cells(int rows, int cols, const Structures& s) const {
    std::vector<int> out;
    if (id == "light-up") {
        for (const Wall& w : s.walls) out.push_back(cell_index(rows, cols, w.cell));
    } else if (id == "trees-and-tents") {
        for (Coord t : s.trees) out.push_back(cell_index(rows, cols, t));
    }
    std::sort(out.begin(), out.end());
    return out;
}

const std::vector<PuzzleDefinition>& registry() {
    static const std::vector<PuzzleDefinition> defs = build_registry();
    return defs;
}

const PuzzleDefinition& lookup(std::string_view id) {
    for (const auto& def : registry()) {
        if (def.id == id) return def;
    }
    std::string valid;
    for (const auto& def : registry()) valid += (valid.empty() ? "" : ", ") + def.id;
    throw Error(ErrorCode::NotRegistered,
                "unknown puzzle '" + std::string(id) + "'; registered: " + valid);
}

std::vector<Tag> taxonomy_of(std::string_view id) { return lookup(id).taxonomy; }

nlohmann::ordered_json catalog() {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& def : registry()) {
        nlohmann::ordered_json entry;
        entry["id"] = def.id;
        nlohmann::ordered_json sizes;
        for (Difficulty d : {Difficulty::Easy, Difficulty::Medium, Difficulty::Hard}) {
            const int n = def.sizes[static_cast<int>(d)];
            sizes[std::string(to_string(d))] = n ? nlohmann::ordered_json({n, n}) : nlohmann::ordered_json();
        }
        entry["sizes"] = sizes;
        auto& tags = entry["taxonomy"] = nlohmann::ordered_json::array();
        for (Tag t : def.taxonomy) tags.push_back(std::string(to_string(t)));
        entry["alphabet"] = def.numeric() ? nlohmann::ordered_json("1..N") : nlohmann::ordered_json(def.symbols);
        entry["reveal_based"] = def.reveal_based;
        entry["structures"] = def.structure_schema;
        entry["rule_prompt"] = def.rule_prompt;
        entry["templates"] = {{"cell_at", def.templates.cell_at},
                              {"direct_solution", def.templates.direct_solution},
                              {"valid_action", def.templates.valid_action},
                              {"cot_solution", def.templates.cot_solution}};
        out.push_back(entry);
    }
    return out;
}

} // namespace gridforge
