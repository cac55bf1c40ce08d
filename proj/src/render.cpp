#include "gridforge/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <set>

#include "gridforge/rng.hpp"
#include "gridforge/rules.hpp"

namespace gridforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Shortest fixed-point text with at most 3 decimals; never locale dependent
// because only digits, '-' and '.' are produced.
std::string num(double v) {
    if (std::abs(v) < 5e-4) v = 0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s == "-0" ? "0" : s;
}

std::string escape(std::string_view text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string cell_attrs(Coord c, std::string_view role, std::string_view value) {
    return " data-row=\"" + std::to_string(c.row) + "\" data-col=\"" + std::to_string(c.col) +
           "\" data-role=\"" + std::string(role) + "\" data-value=\"" + escape(value) + "\"";
}

class Canvas {
public:
    Canvas(const PuzzleInstance& inst, const RenderTheme& theme) : inst_(inst), t_(theme), cs_(theme.cell_size) {
        const Structures& s = inst.structures();
        const double pad = cs_ / 4.0;
        left_ = top_ = right_ = bottom_ = pad;
        std::size_t row_runs = 0, col_runs = 0;
        for (const auto& r : s.row_runs) row_runs = std::max(row_runs, r.size());
        for (const auto& r : s.col_runs) col_runs = std::max(col_runs, r.size());
        left_ += row_runs * cs_ * 0.6;
        top_ += col_runs * cs_ * 0.6;
        if (!s.left.empty()) left_ += cs_;
        if (!s.top.empty()) top_ += cs_;
        if (!s.right.empty() || !s.row_clues.empty()) right_ += cs_;
        if (!s.bottom.empty() || !s.col_clues.empty()) bottom_ += cs_;
        width_ = left_ + right_ + inst.cols() * cs_;
        height_ = top_ + bottom_ + inst.rows() * cs_;
    }

    std::string render() {
        out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width_) + "\" height=\"" +
                num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\" data-puzzle=\"" +
                escape(inst_.definition_id()) + "\" data-rows=\"" + std::to_string(inst_.rows()) +
                "\" data-cols=\"" + std::to_string(inst_.cols()) + "\">\n";
        out_ += "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) + "\" fill=\"" +
                t_.background + "\" data-role=\"background\"/>\n";
        cell_fills();
        grid_lines();
        region_borders();
        cages();
        thermometers();
        edges();
        side_clues();
        cell_glyphs();
        out_ += "</svg>\n";
        return out_;
    }

private:
    double x(int col) const { return left_ + col * cs_; }
    double y(int row) const { return top_ + row * cs_; }
    double cx(int col) const { return x(col) + cs_ / 2.0; }
    double cy(int row) const { return y(row) + cs_ / 2.0; }

    void text(double px, double py, double size, const std::string& fill, const std::string& attrs,
              const std::string& content, const char* anchor = "middle") {
        out_ += "<text x=\"" + num(px) + "\" y=\"" + num(py) + "\" font-family=\"" + escape(t_.font_family) +
                "\" font-size=\"" + num(size) + "\" fill=\"" + fill + "\" text-anchor=\"" + anchor +
                "\" dominant-baseline=\"central\"" + attrs + ">" + escape(content) + "</text>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width,
              const std::string& extra = "") {
        out_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"" + extra + "/>\n";
    }

    void rect(double rx, double ry, double w, double h, const std::string& fill, const std::string& attrs) {
        out_ += "<rect x=\"" + num(rx) + "\" y=\"" + num(ry) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
                "\" fill=\"" + fill + "\"" + attrs + "/>\n";
    }

    void circle(double px, double py, double r, const std::string& fill, const std::string& attrs,
                const std::string& stroke = "none") {
        out_ += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"" + num(r) + "\" fill=\"" + fill +
                "\" stroke=\"" + stroke + "\"" + attrs + "/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
                 const std::string& attrs) {
        std::string p;
        for (const auto& [px, py] : pts) {
            if (!p.empty()) p += ' ';
            p += num(px) + "," + num(py);
        }
        out_ += "<polygon points=\"" + p + "\" fill=\"" + fill + "\"" + attrs + "/>\n";
    }

    // Region id per cell, or empty when the puzzle has no regions to outline.
    std::vector<int> outlined_regions() const {
        const std::string& id = inst_.definition_id();
        const int n = inst_.cols();
        if (id == "sudoku" || id == "killer-sudoku" || id == "odd-even-sudoku") {
            const int bh = n == 9 ? 3 : 2, bw = n == 9 ? 3 : 2;
            std::vector<int> out(inst_.rows() * n);
            for (int i = 0; i < static_cast<int>(out.size()); ++i) out[i] = (i / n) / bh * (n / bw) + (i % n) / bw;
            return out;
        }
        if (id == "colored-sudoku") return {};
        return inst_.structures().regions;
    }

    void cell_fills() {
        const Structures& s = inst_.structures();
        const Grid& g = inst_.grid();
        if (inst_.definition_id() == "colored-sudoku" && !s.regions.empty()) {
            for (int i = 0; i < g.size(); ++i) {
                const Coord c = g.coord(i);
                const std::string& color = t_.group_colors[s.regions[i] % t_.group_colors.size()];
                rect(x(c.col), y(c.row), cs_, cs_, color,
                     cell_attrs(c, "group", std::to_string(s.regions[i])));
            }
        }
        for (std::size_t i = 0; i < s.parity.size(); ++i) {
            if (s.parity[i] != 1) continue;
            const Coord c = g.coord(static_cast<int>(i));
            rect(x(c.col), y(c.row), cs_, cs_, t_.parity_fill, cell_attrs(c, "parity", "even"));
        }
    }

    void grid_lines() {
        const int rows = inst_.rows(), cols = inst_.cols();
        for (int r = 0; r <= rows; ++r) {
            line(x(0), y(r), x(cols), y(r), t_.grid_line, 1, " data-role=\"grid\"");
        }
        for (int c = 0; c <= cols; ++c) {
            line(x(c), y(0), x(c), y(rows), t_.grid_line, 1, " data-role=\"grid\"");
        }
    }

    void region_borders() {
        const auto region = outlined_regions();
        const int rows = inst_.rows(), cols = inst_.cols();
        const std::string attrs = " stroke-linecap=\"square\" data-role=\"region-border\"";
        if (!region.empty()) {
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) {
                    const int i = r * cols + c;
                    if (c + 1 < cols && region[i] != region[i + 1]) line(x(c + 1), y(r), x(c + 1), y(r + 1), t_.region_border, 3, attrs);
                    if (r + 1 < rows && region[i] != region[i + cols]) line(x(c), y(r + 1), x(c + 1), y(r + 1), t_.region_border, 3, attrs);
                }
            }
        }
        out_ += "<rect x=\"" + num(x(0)) + "\" y=\"" + num(y(0)) + "\" width=\"" + num(cols * cs_) +
                "\" height=\"" + num(rows * cs_) + "\" fill=\"none\" stroke=\"" + t_.region_border +
                "\" stroke-width=\"3\" data-role=\"frame\"/>\n";
    }

    void cages() {
        const auto& cages = inst_.structures().cages;
        if (cages.empty()) return;
        const int cols = inst_.cols();
        std::vector<int> owner(inst_.rows() * cols, -1);
        for (std::size_t k = 0; k < cages.size(); ++k) {
            for (Coord c : cages[k].cells) owner[c.row * cols + c.col] = static_cast<int>(k);
        }
        const double in = cs_ * 0.1;
        const std::string dash = " stroke-dasharray=\"" + t_.cage_dash + "\" data-role=\"cage\"";
        for (std::size_t k = 0; k < cages.size(); ++k) {
            for (Coord c : cages[k].cells) {
                auto same = [&](int r, int col) {
                    return r >= 0 && col >= 0 && r < inst_.rows() && col < cols &&
                           owner[r * cols + col] == static_cast<int>(k);
                };
                const double x0 = x(c.col) + (same(c.row, c.col - 1) ? 0 : in);
                const double x1 = x(c.col + 1) - (same(c.row, c.col + 1) ? 0 : in);
                const double y0 = y(c.row) + (same(c.row - 1, c.col) ? 0 : in);
                const double y1 = y(c.row + 1) - (same(c.row + 1, c.col) ? 0 : in);
                if (!same(c.row - 1, c.col)) line(x0, y0, x1, y0, t_.cage_line, 1, dash);
                if (!same(c.row + 1, c.col)) line(x0, y1, x1, y1, t_.cage_line, 1, dash);
                if (!same(c.row, c.col - 1)) line(x0, y0, x0, y1, t_.cage_line, 1, dash);
                if (!same(c.row, c.col + 1)) line(x1, y0, x1, y1, t_.cage_line, 1, dash);
            }
            // Target goes in the cage's first cell in row-major order.
            const Coord anchor = *std::min_element(cages[k].cells.begin(), cages[k].cells.end());
            text(x(anchor.col) + in * 1.3, y(anchor.row) + in * 2.2, cs_ * 0.26, t_.cage_target,
                 cell_attrs(anchor, "cage-target", std::to_string(cages[k].target)),
                 std::to_string(cages[k].target), "start");
        }
    }

    void thermometers() {
        const auto& thermos = inst_.structures().thermometers;
        for (std::size_t k = 0; k < thermos.size(); ++k) {
            const auto& cells = thermos[k];
            if (cells.empty()) continue;
            const std::string id = std::to_string(k);
            for (std::size_t j = 1; j < cells.size(); ++j) {
                line(cx(cells[j - 1].col), cy(cells[j - 1].row), cx(cells[j].col), cy(cells[j].row), t_.thermometer,
                     cs_ * 0.3, " stroke-linecap=\"round\" data-role=\"thermometer-tube\" data-thermometer=\"" + id + "\"");
            }
            circle(cx(cells[0].col), cy(cells[0].row), cs_ * 0.3, t_.thermometer,
                   cell_attrs(cells[0], "thermometer-bulb", id));
        }
    }

    void edges() {
        const Structures& s = inst_.structures();
        for (const Edge& e : s.inequalities) {
            // Drawn between the two cells, pointing at the larger one.
            const double mx = (cx(e.a.col) + cx(e.b.col)) / 2, my = (cy(e.a.row) + cy(e.b.row)) / 2;
            std::string glyph;
            if (e.a.row == e.b.row) glyph = e.a.col < e.b.col ? "<" : ">";
            else glyph = e.a.row < e.b.row ? "^" : "v";
            text(mx, my, cs_ * 0.35, t_.text, cell_attrs(e.a, "inequality", glyph) +
                 " data-row2=\"" + std::to_string(e.b.row) + "\" data-col2=\"" + std::to_string(e.b.col) + "\"", glyph);
        }
        for (const Edge& e : s.dots) {
            const double mx = (cx(e.a.col) + cx(e.b.col)) / 2, my = (cy(e.a.row) + cy(e.b.row)) / 2;
            circle(mx, my, cs_ * 0.09, t_.mark_dot, cell_attrs(e.a, "dot", "consecutive") +
                   " data-row2=\"" + std::to_string(e.b.row) + "\" data-col2=\"" + std::to_string(e.b.col) + "\"");
        }
    }

    void clue(double px, double py, const std::string& role, const std::string& side, int index, int value) {
        text(px, py, cs_ * 0.45, t_.clue_text,
             " data-role=\"" + role + "\" data-side=\"" + side + "\" data-index=\"" + std::to_string(index) +
                 "\" data-value=\"" + std::to_string(value) + "\"",
             std::to_string(value));
    }

    void side_clues() {
        const Structures& s = inst_.structures();
        const int rows = inst_.rows(), cols = inst_.cols();
        const double half = cs_ / 2.0;
        for (std::size_t c = 0; c < s.top.size(); ++c) {
            if (s.top[c] > 0) clue(cx(static_cast<int>(c)), y(0) - half, "side-clue", "top", static_cast<int>(c), s.top[c]);
        }
        for (std::size_t c = 0; c < s.bottom.size(); ++c) {
            if (s.bottom[c] > 0) clue(cx(static_cast<int>(c)), y(rows) + half, "side-clue", "bottom", static_cast<int>(c), s.bottom[c]);
        }
        for (std::size_t r = 0; r < s.left.size(); ++r) {
            if (s.left[r] > 0) clue(x(0) - half, cy(static_cast<int>(r)), "side-clue", "left", static_cast<int>(r), s.left[r]);
        }
        for (std::size_t r = 0; r < s.right.size(); ++r) {
            if (s.right[r] > 0) clue(x(cols) + half, cy(static_cast<int>(r)), "side-clue", "right", static_cast<int>(r), s.right[r]);
        }
        // Row totals on the right edge, column totals along the bottom.
        for (std::size_t r = 0; r < s.row_clues.size(); ++r) {
            clue(x(cols) + half, cy(static_cast<int>(r)), "row-clue", "right", static_cast<int>(r), s.row_clues[r]);
        }
        for (std::size_t c = 0; c < s.col_clues.size(); ++c) {
            clue(cx(static_cast<int>(c)), y(rows) + half, "col-clue", "bottom", static_cast<int>(c), s.col_clues[c]);
        }
        const double step = cs_ * 0.6;
        for (std::size_t r = 0; r < s.row_runs.size(); ++r) {
            const auto& runs = s.row_runs[r];
            for (std::size_t k = 0; k < runs.size(); ++k) {
                const double px = x(0) - step * (runs.size() - k) + step / 2 - cs_ / 8.0;
                text(px, cy(static_cast<int>(r)), cs_ * 0.38, t_.clue_text,
                     " data-role=\"row-run\" data-row=\"" + std::to_string(r) + "\" data-index=\"" + std::to_string(k) +
                         "\" data-value=\"" + std::to_string(runs[k]) + "\"",
                     std::to_string(runs[k]));
            }
        }
        for (std::size_t c = 0; c < s.col_runs.size(); ++c) {
            const auto& runs = s.col_runs[c];
            for (std::size_t k = 0; k < runs.size(); ++k) {
                const double py = y(0) - step * (runs.size() - k) + step / 2 - cs_ / 8.0;
                text(cx(static_cast<int>(c)), py, cs_ * 0.38, t_.clue_text,
                     " data-role=\"col-run\" data-col=\"" + std::to_string(c) + "\" data-index=\"" + std::to_string(k) +
                         "\" data-value=\"" + std::to_string(runs[k]) + "\"",
                     std::to_string(runs[k]));
            }
        }
    }

    void star(Coord c, const std::string& attrs) {
        std::vector<std::pair<double, double>> pts;
        for (int k = 0; k < 10; ++k) {
            const double r = (k % 2 == 0 ? 0.38 : 0.16) * cs_;
            const double a = -kPi / 2 + k * kPi / 5;
            pts.push_back({cx(c.col) + r * std::cos(a), cy(c.row) + r * std::sin(a)});
        }
        polygon(pts, t_.star, attrs);
    }

    // A cell whose content is fixed before solving.
    void given(Coord c, const std::string& token) {
        const std::string& id = inst_.definition_id();
        const std::string attrs = cell_attrs(c, "given", token);
        const double m = cs_ * 0.15;
        if (inst_.alphabet().numeric()) {
            text(cx(c.col), cy(c.row), cs_ * 0.55, t_.text, attrs, token);
        } else if (id == "binairo") {
            circle(cx(c.col), cy(c.row), cs_ * 0.32, token == "b" ? t_.shaded : t_.background, attrs, t_.shaded);
        } else if (token == "e") {
            // Deliberately empty cells get a small dot.
            circle(cx(c.col), cy(c.row), cs_ * 0.08, t_.marker, attrs);
        } else if (id == "trees-and-tents") {
            polygon({{cx(c.col), y(c.row) + m}, {x(c.col + 1) - m, y(c.row + 1) - m}, {x(c.col) + m, y(c.row + 1) - m}},
                    t_.tent, attrs);
        } else if (id == "battle-ships") {
            circle(cx(c.col), cy(c.row), cs_ * 0.34, t_.ship, attrs);
        } else if (id == "light-up") {
            circle(cx(c.col), cy(c.row), cs_ * 0.3, t_.bulb, attrs, t_.shaded);
        } else if (id == "star-battle") {
            star(c, attrs);
        } else {
            rect(x(c.col) + m / 2, y(c.row) + m / 2, cs_ - m, cs_ - m, t_.shaded, attrs);
        }
    }

    void cell_glyphs() {
        const Structures& s = inst_.structures();
        const Grid& g = inst_.grid();
        const std::string& id = inst_.definition_id();
        std::set<Coord> covered;
        for (const Wall& w : s.walls) {
            rect(x(w.cell.col), y(w.cell.row), cs_, cs_, t_.wall, cell_attrs(w.cell, "wall", "w"));
            if (w.number >= 0) {
                text(cx(w.cell.col), cy(w.cell.row), cs_ * 0.5, t_.wall_text,
                     cell_attrs(w.cell, "wall-number", std::to_string(w.number)), std::to_string(w.number));
            }
        }
        for (Coord t : s.trees) {
            const double r = cs_ * 0.3;
            polygon({{cx(t.col), cy(t.row) - r}, {cx(t.col) + r * 0.8, cy(t.row) + r * 0.6},
                     {cx(t.col) - r * 0.8, cy(t.row) + r * 0.6}},
                    t_.tree, cell_attrs(t, "tree", "tr"));
        }
        if (id == "hitori") {
            for (int i = 0; i < g.size() && i < static_cast<int>(s.numbers.size()); ++i) {
                const Coord c = g.coord(i);
                text(cx(c.col), cy(c.row), cs_ * 0.5, t_.text, cell_attrs(c, "number", std::to_string(s.numbers[i])),
                     std::to_string(s.numbers[i]));
            }
        }
        for (const Revealed& rv : s.revealed) {
            covered.insert(rv.cell);
            rect(x(rv.cell.col) + 1, y(rv.cell.row) + 1, cs_ - 2, cs_ - 2, t_.parity_fill,
                 " data-role=\"revealed-background\"");
            text(cx(rv.cell.col), cy(rv.cell.row), cs_ * 0.5, t_.text,
                 cell_attrs(rv.cell, "number", std::to_string(rv.number)), std::to_string(rv.number));
        }
        for (const Condition& cond : inst_.conditions()) {
            if (covered.count(cond.cell)) continue;
            given(cond.cell, cond.value);
        }
    }

    const PuzzleInstance& inst_;
    const RenderTheme& t_;
    double cs_;
    double left_ = 0, top_ = 0, right_ = 0, bottom_ = 0;
    double width_ = 0, height_ = 0;
    std::string out_;
};

const std::set<std::string>& css_names() {
    static const std::set<std::string> names = [] {
        static const char* const list =
            "aliceblue antiquewhite aqua aquamarine azure beige bisque black blanchedalmond blue blueviolet brown "
            "burlywood cadetblue chartreuse chocolate coral cornflowerblue cornsilk crimson cyan darkblue darkcyan "
            "darkgoldenrod darkgray darkgreen darkgrey darkkhaki darkmagenta darkolivegreen darkorange darkorchid "
            "darkred darksalmon darkseagreen darkslateblue darkslategray darkslategrey darkturquoise darkviolet "
            "deeppink deepskyblue dimgray dimgrey dodgerblue firebrick floralwhite forestgreen fuchsia gainsboro "
            "ghostwhite gold goldenrod gray green greenyellow grey honeydew hotpink indianred indigo ivory khaki "
            "lavender lavenderblush lawngreen lemonchiffon lightblue lightcoral lightcyan lightgoldenrodyellow "
            "lightgray lightgreen lightgrey lightpink lightsalmon lightseagreen lightskyblue lightslategray "
            "lightslategrey lightsteelblue lightyellow lime limegreen linen magenta maroon mediumaquamarine "
            "mediumblue mediumorchid mediumpurple mediumseagreen mediumslateblue mediumspringgreen "
            "mediumturquoise mediumvioletred midnightblue mintcream mistyrose moccasin navajowhite navy oldlace "
            "olive olivedrab orange orangered orchid palegoldenrod palegreen paleturquoise palevioletred "
            "papayawhip peachpuff peru pink plum powderblue purple rebeccapurple red rosybrown royalblue "
            "saddlebrown salmon sandybrown seagreen seashell sienna silver skyblue slateblue slategray slategrey "
            "snow springgreen steelblue tan teal thistle tomato turquoise violet wheat white whitesmoke yellow "
            "yellowgreen transparent none";
        std::set<std::string> out;
        std::string word;
        for (const char* p = list;; ++p) {
            if (*p == ' ' || *p == '\0') {
                if (!word.empty()) out.insert(word);
                word.clear();
                if (*p == '\0') break;
            } else {
                word += *p;
            }
        }
        return out;
    }();
    return names;
}

std::string attr_value(std::string_view tag, std::string_view name) {
    const std::string key = " " + std::string(name) + "=\"";
    const auto pos = tag.find(key);
    if (pos == std::string_view::npos) return {};
    const auto start = pos + key.size();
    const auto end = tag.find('"', start);
    if (end == std::string_view::npos) return {};
    return std::string(tag.substr(start, end - start));
}

} // namespace

RenderTheme default_theme() { return RenderTheme{}; }

bool is_css_color(std::string_view text) {
    static const std::regex hex("#([0-9a-fA-F]{3}|[0-9a-fA-F]{4}|[0-9a-fA-F]{6}|[0-9a-fA-F]{8})");
    static const std::regex func(R"((rgb|rgba|hsl|hsla)\(\s*[0-9.]+%?\s*(,\s*[0-9.]+%?\s*){2}(,\s*[0-9.]+%?\s*)?\))");
    const std::string s(text);
    if (std::regex_match(s, hex) || std::regex_match(s, func)) return true;
    std::string lower;
    for (char ch : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return css_names().count(lower) > 0;
}

void validate_theme(const RenderTheme& t) {
    if (t.cell_size < 24) {
        throw Error(ErrorCode::Schema, "theme cell_size must be at least 24 px, got " + std::to_string(t.cell_size));
    }
    const std::pair<const char*, const std::string*> colors[] = {
        {"background", &t.background},   {"grid_line", &t.grid_line},     {"region_border", &t.region_border},
        {"cage_line", &t.cage_line},     {"cage_target", &t.cage_target}, {"parity_fill", &t.parity_fill},
        {"text", &t.text},               {"clue_text", &t.clue_text},     {"thermometer", &t.thermometer},
        {"bulb", &t.bulb},               {"wall", &t.wall},               {"wall_text", &t.wall_text},
        {"tree", &t.tree},               {"tent", &t.tent},               {"ship", &t.ship},
        {"star", &t.star},               {"shaded", &t.shaded},           {"marker", &t.marker},
        {"mark_dot", &t.mark_dot},
    };
    for (const auto& [name, value] : colors) {
        if (!is_css_color(*value)) throw Error(ErrorCode::Schema, std::string("theme ") + name + " is not a CSS colour: " + *value);
    }
    if (t.group_colors.empty()) throw Error(ErrorCode::Schema, "theme group_colors must not be empty");
    for (const auto& c : t.group_colors) {
        if (!is_css_color(c)) throw Error(ErrorCode::Schema, "theme group colour is not a CSS colour: " + c);
    }
    static const std::regex dash(R"([0-9]+(\.[0-9]+)?([ ,]+[0-9]+(\.[0-9]+)?)*)");
    if (!std::regex_match(t.cage_dash, dash)) throw Error(ErrorCode::Schema, "theme cage_dash is not a dash array");
    for (char ch : t.font_family) {
        if (ch == '"' || ch == '<' || ch == '>') throw Error(ErrorCode::Schema, "theme font_family has markup characters");
    }
}

ojson theme_to_json(const RenderTheme& t) {
    return ojson{{"cell_size", t.cell_size},     {"background", t.background},   {"grid_line", t.grid_line},
                 {"region_border", t.region_border}, {"cage_line", t.cage_line}, {"cage_dash", t.cage_dash},
                 {"cage_target", t.cage_target}, {"parity_fill", t.parity_fill}, {"text", t.text},
                 {"clue_text", t.clue_text},     {"font_family", t.font_family}, {"thermometer", t.thermometer},
                 {"bulb", t.bulb},               {"wall", t.wall},               {"wall_text", t.wall_text},
                 {"tree", t.tree},               {"tent", t.tent},               {"ship", t.ship},
                 {"star", t.star},               {"shaded", t.shaded},           {"marker", t.marker},
                 {"mark_dot", t.mark_dot},       {"group_colors", t.group_colors}};
}

RenderTheme theme_from_json(const ojson& j) {
    if (!j.is_object()) throw Error(ErrorCode::Schema, "theme must be a JSON object");
    RenderTheme t;
    ojson base = theme_to_json(t);
    try {
        for (const auto& [key, value] : j.items()) {
            if (!base.contains(key)) throw Error(ErrorCode::Schema, "unknown theme field: " + key);
            if (base[key].type() != value.type() &&
                !(base[key].is_number_integer() && value.is_number_unsigned())) {
                throw Error(ErrorCode::Schema, "theme field " + key + " has the wrong type");
            }
            base[key] = value;
        }
        t.cell_size = base["cell_size"].get<int>();
        t.background = base["background"];
        t.grid_line = base["grid_line"];
        t.region_border = base["region_border"];
        t.cage_line = base["cage_line"];
        t.cage_dash = base["cage_dash"];
        t.cage_target = base["cage_target"];
        t.parity_fill = base["parity_fill"];
        t.text = base["text"];
        t.clue_text = base["clue_text"];
        t.font_family = base["font_family"];
        t.thermometer = base["thermometer"];
        t.bulb = base["bulb"];
        t.wall = base["wall"];
        t.wall_text = base["wall_text"];
        t.tree = base["tree"];
        t.tent = base["tent"];
        t.ship = base["ship"];
        t.star = base["star"];
        t.shaded = base["shaded"];
        t.marker = base["marker"];
        t.mark_dot = base["mark_dot"];
        t.group_colors = base["group_colors"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("theme: ") + e.what());
    }
    validate_theme(t);
    return t;
}

std::string render_svg(const PuzzleInstance& instance, const RenderTheme& theme) {
    validate_theme(theme);
    static const std::set<std::string> known = {"regions", "cages",        "row_clues",    "col_clues", "top",
                                                "bottom",  "left",         "right",        "row_runs",  "col_runs",
                                                "inequalities", "dots",    "parity",       "thermometers", "trees",
                                                "walls",   "fleet",        "revealed",     "numbers"};
    for (const std::string& field : instance.definition().structure_schema) {
        if (!known.count(field)) {
            throw Error(ErrorCode::UnsupportedStructure,
                        "renderer has no drawing for structure '" + field + "' of " + instance.definition_id());
        }
    }
    return Canvas(instance, theme).render();
}

bool AffineParams::is_identity() const {
    return rotation == 0 && scale_x == 1 && scale_y == 1 && shear == 0 && translate_x == 0 && translate_y == 0;
}

void AffineParams::validate() const {
    if (!(rotation >= -15 && rotation <= 15)) throw Error(ErrorCode::InvalidArgument, "rotation must lie within +-15 degrees");
    if (!(scale_x > 0) || !(scale_y > 0)) throw Error(ErrorCode::InvalidArgument, "scale factors must be positive");
    if (!std::isfinite(shear) || !std::isfinite(translate_x) || !std::isfinite(translate_y) || !std::isfinite(scale_x) ||
        !std::isfinite(scale_y)) {
        throw Error(ErrorCode::InvalidArgument, "affine parameters must be finite");
    }
}

std::array<double, 4> AffineParams::linear() const {
    // rotation * shear * scale
    const double th = rotation * kPi / 180.0;
    const double co = std::cos(th), si = std::sin(th);
    const double m00 = scale_x, m01 = shear * scale_y, m10 = 0, m11 = scale_y;
    const double a = co * m00 - si * m10, c = co * m01 - si * m11;
    const double b = si * m00 + co * m10, d = si * m01 + co * m11;
    return {a, b, c, d};
}

AffineParams AffineParams::random(std::uint64_t seed) {
    Rng rng(mix64(seed ^ 0x616666696e65ULL));
    AffineParams p;
    p.rotation = -15 + 30 * rng.unit();
    p.scale_x = 0.85 + 0.3 * rng.unit();
    p.scale_y = 0.85 + 0.3 * rng.unit();
    p.shear = -0.15 + 0.3 * rng.unit();
    p.translate_x = -10 + 20 * rng.unit();
    p.translate_y = -10 + 20 * rng.unit();
    p.seed = seed;
    return p;
}

SvgSize augmented_size(SvgSize page, const AffineParams& p) {
    const auto [a, b, c, d] = p.linear();
    // Extent of the image of the page rectangle along each axis.
    const double w = std::abs(a) * page.width + std::abs(c) * page.height;
    const double h = std::abs(b) * page.width + std::abs(d) * page.height;
    return {w + std::abs(p.translate_x), h + std::abs(p.translate_y)};
}

SvgSize svg_size(std::string_view svg) {
    const auto open = svg.find("<svg");
    const auto close = svg.find('>', open);
    if (open == std::string_view::npos || close == std::string_view::npos) {
        throw Error(ErrorCode::Schema, "no <svg> root element");
    }
    const auto tag = svg.substr(open, close - open);
    try {
        return {std::stod(attr_value(tag, "width")), std::stod(attr_value(tag, "height"))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::Schema, "root element lacks numeric width/height");
    }
}

std::string augment(const std::string& svg, const AffineParams& params) {
    if (params.is_identity()) return svg;
    params.validate();
    const SvgSize page = svg_size(svg);
    const auto [a, b, c, d] = params.linear();
    // Corners of the transformed page; shift so the box starts at the origin.
    double min_x = 0, min_y = 0;
    for (const auto& [px, py] : {std::pair{0.0, 0.0}, {page.width, 0.0}, {0.0, page.height}, {page.width, page.height}}) {
        min_x = std::min(min_x, a * px + c * py);
        min_y = std::min(min_y, b * px + d * py);
    }
    const SvgSize out = augmented_size(page, params);
    const double e = -min_x + std::max(0.0, params.translate_x);
    const double f = -min_y + std::max(0.0, params.translate_y);

    const auto open = svg.find("<svg");
    const auto close = svg.find('>', open);
    const auto end = svg.rfind("</svg>");
    if (end == std::string::npos || end < close) throw Error(ErrorCode::Schema, "unterminated <svg> document");
    std::string tag = svg.substr(open, close - open + 1);
    auto replace_attr = [&](const std::string& name, const std::string& value) {
        const std::string key = " " + name + "=\"";
        const auto pos = tag.find(key);
        if (pos == std::string::npos) return;
        const auto vend = tag.find('"', pos + key.size());
        tag.replace(pos + key.size(), vend - pos - key.size(), value);
    };
    // Rounded up at print precision so the canvas never clips.
    const double w = std::ceil(out.width * 1000) / 1000, h = std::ceil(out.height * 1000) / 1000;
    replace_attr("width", num(w));
    replace_attr("height", num(h));
    replace_attr("viewBox", "0 0 " + num(w) + " " + num(h));
    char matrix[256];
    std::snprintf(matrix, sizeof matrix, "matrix(%.6f %.6f %.6f %.6f %.3f %.3f)", a, b, c, d, e, f);
    std::string result = svg.substr(0, open) + tag + "\n<g transform=\"" + matrix + "\" data-role=\"augment\" data-seed=\"" +
                         std::to_string(params.seed) + "\">" + svg.substr(close + 1, end - close - 1) + "</g>\n" +
                         svg.substr(end);
    return result;
}

} // namespace gridforge
