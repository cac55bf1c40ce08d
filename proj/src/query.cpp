#include "gridforge/query.hpp"

#include <algorithm>

#include "gridforge/rng.hpp"
#include "gridforge/rules.hpp"
#include "gridforge/solver.hpp"

namespace gridforge {

namespace {

void replace_all(std::string& text, std::string_view from, std::string_view to) {
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string int_list(const std::vector<int>& v) {
    std::vector<std::string> parts;
    for (int x : v) parts.push_back(std::to_string(x));
    return "[" + join(parts) + "]";
}

std::string coord_text(Coord c) { return to_string(c); }

// Cell matrix of per-cell integers.
std::string int_matrix(const std::vector<int>& v, int rows, int cols) {
    std::vector<std::string> lines;
    for (int r = 0; r < rows; ++r) {
        std::vector<int> row(v.begin() + r * cols, v.begin() + (r + 1) * cols);
        lines.push_back(int_list(row));
    }
    return "[" + join(lines) + "]";
}

bool needs_target(QueryKind k) { return k == QueryKind::CellAt || k == QueryKind::ValidAction; }

// Symbol a ValidAction query proposes.
std::string action_value(const PuzzleInstance& inst, const QueryTarget& t) {
    const std::string& fallback = inst.definition().action_symbol;
    const std::string value = t.value.empty() ? fallback : t.value;
    if (value.empty()) throw Error(ErrorCode::MissingTarget, "valid-action query for " + inst.definition_id() + " needs a value");
    if (!inst.alphabet().contains(value)) {
        throw Error(ErrorCode::InvalidArgument,
                    "value '" + value + "' is not a symbol of " + inst.definition_id());
    }
    return value;
}

} // namespace

std::string_view to_string(QueryKind kind) {
    switch (kind) {
    case QueryKind::CellAt: return "cell_at";
    case QueryKind::DirectSolution: return "direct_solution";
    case QueryKind::ValidAction: return "valid_action";
    case QueryKind::CoTSolution: return "cot_solution";
    }
    return "?";
}

QueryKind parse_query_kind(std::string_view text) {
    for (QueryKind k : {QueryKind::CellAt, QueryKind::DirectSolution, QueryKind::ValidAction, QueryKind::CoTSolution}) {
        if (text == to_string(k)) return k;
    }
    if (text == "cell-at") return QueryKind::CellAt;
    if (text == "direct" || text == "direct-solution") return QueryKind::DirectSolution;
    if (text == "valid-action") return QueryKind::ValidAction;
    if (text == "cot" || text == "cot-solution") return QueryKind::CoTSolution;
    throw Error(ErrorCode::InvalidArgument,
                "unknown query kind '" + std::string(text) + "' (cell_at, direct_solution, valid_action, cot_solution)");
}

std::string_view to_string(Modality m) { return m == Modality::Image ? "image" : "text"; }

Modality parse_modality(std::string_view text) {
    if (text == "image") return Modality::Image;
    if (text == "text") return Modality::Text;
    throw Error(ErrorCode::InvalidArgument, "unknown modality '" + std::string(text) + "' (image, text)");
}

std::vector<std::string> cell_at_choices(const PuzzleInstance& inst) {
    const std::string& id = inst.definition_id();
    if (id == "aquarium") return {"water", "empty"};
    if (id == "battle-ships") return {"ship", "empty", "unknown"};
    if (id == "binairo") return {"b", "w", "empty"};
    if (id == "field-explore") return {"mine", "number", "hidden"};
    if (id == "kakurasu") return {"shaded", "empty"};
    if (id == "light-up") return {"*", "s", "w"};
    if (id == "nonogram") return {"shaded", "empty"};
    if (id == "star-battle") return {"star", "empty"};
    if (id == "thermometers") return {"filled", "empty"};
    if (id == "trees-and-tents") return {"tree", "tent", "empty"};
    std::vector<std::string> out;
    for (int v = 1; v <= inst.cols(); ++v) out.push_back(std::to_string(v));
    if (id != "hitori") out.push_back("empty");
    return out;
}

std::string cell_at_truth(const PuzzleInstance& inst, Coord cell) {
    if (!inst.grid().in_bounds(cell)) throw Error(ErrorCode::OutOfBounds, "cell " + to_string(cell) + " is off the board");
    const std::string& id = inst.definition_id();
    const std::string token = perception_tokens(inst)[cell.row][cell.col];
    if (id == "hitori") return token;
    if (id == "field-explore") {
        if (token == "*") return "hidden";
        return token == "s" ? "mine" : "number";
    }
    if (token == "*") {
        if (id == "light-up") return "*";  // its template offers [*, s, w]
        return id == "battle-ships" ? "unknown" : "empty";
    }
    if (inst.alphabet().numeric() || id == "binairo" || id == "light-up") return token;
    if (token == "e") return "empty";
    if (id == "trees-and-tents") return token == "tr" ? "tree" : "tent";
    if (id == "aquarium") return "water";
    if (id == "battle-ships") return "ship";
    if (id == "star-battle") return "star";
    if (id == "thermometers") return "filled";
    return "shaded";  // nonogram, kakurasu
}

std::string encode_text_board(const PuzzleInstance& inst) {
    std::string out = format_tokens(perception_tokens(inst));
    const Structures& s = inst.structures();
    const int rows = inst.rows(), cols = inst.cols();
    auto add = [&](const std::string& label, const std::string& body) { out += "\n" + label + ": " + body; };
    if (!s.regions.empty()) add(inst.definition_id() == "colored-sudoku" ? "Color groups" : "Regions", int_matrix(s.regions, rows, cols));
    if (!s.cages.empty()) {
        std::vector<std::string> cages;
        for (const Cage& c : s.cages) {
            std::vector<std::string> cells;
            for (Coord x : c.cells) cells.push_back(coord_text(x));
            cages.push_back("{cells: [" + join(cells) + "], target: " + std::to_string(c.target) + "}");
        }
        add("Cages", "[" + join(cages) + "]");
    }
    if (!s.row_clues.empty()) add("Row clues", int_list(s.row_clues));
    if (!s.col_clues.empty()) add("Column clues", int_list(s.col_clues));
    if (!s.top.empty()) add("Top clues", int_list(s.top));
    if (!s.bottom.empty()) add("Bottom clues", int_list(s.bottom));
    if (!s.left.empty()) add("Left clues", int_list(s.left));
    if (!s.right.empty()) add("Right clues", int_list(s.right));
    auto runs = [&](const std::vector<std::vector<int>>& all) {
        std::vector<std::string> parts;
        for (const auto& r : all) parts.push_back(int_list(r));
        return "[" + join(parts) + "]";
    };
    if (!s.row_runs.empty()) add("Row runs", runs(s.row_runs));
    if (!s.col_runs.empty()) add("Column runs", runs(s.col_runs));
    if (!s.inequalities.empty()) {
        std::vector<std::string> parts;
        for (const Edge& e : s.inequalities) parts.push_back(coord_text(e.a) + " < " + coord_text(e.b));
        add("Inequalities", "[" + join(parts) + "]");
    }
    if (!s.dots.empty()) {
        std::vector<std::string> parts;
        for (const Edge& e : s.dots) parts.push_back(coord_text(e.a) + " - " + coord_text(e.b));
        add("Consecutive pairs", "[" + join(parts) + "]");
    }
    if (!s.parity.empty()) {
        std::vector<std::string> lines;
        for (int r = 0; r < rows; ++r) {
            std::vector<std::string> row;
            for (int c = 0; c < cols; ++c) {
                const int p = s.parity[r * cols + c];
                row.push_back(p == 1 ? "even" : p == 0 ? "odd" : "*");
            }
            lines.push_back("[" + join(row) + "]");
        }
        add("Parity", "[" + join(lines) + "]");
    }
    if (!s.thermometers.empty()) {
        std::vector<std::string> parts;
        for (const auto& t : s.thermometers) {
            std::vector<std::string> cells;
            for (Coord c : t) cells.push_back(coord_text(c));
            parts.push_back("[" + join(cells) + "]");
        }
        add("Thermometers (bulb first)", "[" + join(parts) + "]");
    }
    if (!s.walls.empty()) {
        std::vector<std::string> parts;
        for (const Wall& w : s.walls) {
            if (w.number >= 0) parts.push_back(coord_text(w.cell) + ": " + std::to_string(w.number));
        }
        if (!parts.empty()) add("Wall numbers", "[" + join(parts) + "]");
    }
    if (!s.fleet.empty()) add("Fleet", int_list(s.fleet));
    return out;
}

std::string fill_template(const PuzzleInstance& inst, QueryKind kind, const std::optional<QueryTarget>& target) {
    const QueryTemplates& t = inst.definition().templates;
    std::string text;
    switch (kind) {
    case QueryKind::CellAt: text = t.cell_at; break;
    case QueryKind::DirectSolution: text = t.direct_solution; break;
    case QueryKind::ValidAction: text = t.valid_action; break;
    case QueryKind::CoTSolution: text = t.cot_solution; break;
    }
    if (target) {
        replace_all(text, "{row}", std::to_string(target->cell.row));
        replace_all(text, "{col}", std::to_string(target->cell.col));
        if (kind == QueryKind::ValidAction) {
            const std::string value = action_value(inst, *target);
            replace_all(text, "{value}", value);
            // Binairo's template spells the value slot as the symbol pair.
            if (inst.definition_id() == "binairo") replace_all(text, "{b, w}", value);
        }
    }
    // Rule last, so braces inside the rule text are never taken for slots.
    replace_all(text, "{Rule}", inst.definition().rule_prompt);
    return text;
}

QueryRecord emit_query(const PuzzleInstance& inst, QueryKind kind, const std::optional<QueryTarget>& target,
                       Modality modality, const std::string& image_path) {
    if (needs_target(kind) && !target) {
        throw Error(ErrorCode::MissingTarget, std::string(to_string(kind)) + " query needs a target cell");
    }
    if (!needs_target(kind) && target) {
        throw Error(ErrorCode::MissingTarget, std::string(to_string(kind)) + " query takes no target");
    }
    if (target && !inst.grid().in_bounds(target->cell)) {
        throw Error(ErrorCode::OutOfBounds, "cell " + to_string(target->cell) + " is off the " +
                                                std::to_string(inst.rows()) + "x" + std::to_string(inst.cols()) + " board");
    }
    QueryRecord q;
    q.puzzle = inst.definition_id();
    q.kind = kind;
    q.modality = modality;
    q.instance_hash = instance_hash(inst);
    q.id = q.instance_hash + "-" + std::string(to_string(kind));
    std::optional<QueryTarget> resolved = target;
    switch (kind) {
    case QueryKind::CellAt:
        q.truth = cell_at_truth(inst, target->cell);
        q.choices = cell_at_choices(inst);
        q.id += "-" + std::to_string(target->cell.row) + "-" + std::to_string(target->cell.col);
        break;
    case QueryKind::ValidAction: {
        resolved->value = action_value(inst, *target);
        const ActionVerdict v = valid_action(inst, inst.grid(), target->cell, resolved->value);
        q.truth = std::holds_alternative<Valid>(v) ? "valid" : "invalid";
        q.choices = {"valid", "invalid"};
        q.id += "-" + std::to_string(target->cell.row) + "-" + std::to_string(target->cell.col) + "-" + resolved->value;
        break;
    }
    case QueryKind::DirectSolution:
    case QueryKind::CoTSolution:
        q.perception = perception_tokens(inst);
        if (inst.solution()) q.reference = state_tokens(inst, *inst.solution());
        q.instance = to_json(inst);
        break;
    }
    q.target = resolved;
    q.prompt = fill_template(inst, kind, resolved);
    if (modality == Modality::Text) {
        q.board = encode_text_board(inst);
        q.prompt += "\n" + q.board;
    } else {
        q.image_path = image_path;
    }
    return q;
}

ojson query_to_json(const QueryRecord& q) {
    ojson j;
    j["id"] = q.id;
    j["puzzle"] = q.puzzle;
    j["kind"] = std::string(to_string(q.kind));
    j["modality"] = std::string(to_string(q.modality));
    j["prompt"] = q.prompt;
    if (q.modality == Modality::Image) j["image_path"] = q.image_path;
    else j["board"] = q.board;
    if (q.target) {
        ojson t = {{"row", q.target->cell.row}, {"col", q.target->cell.col}};
        if (!q.target->value.empty()) t["value"] = q.target->value;
        j["target"] = t;
    }
    if (!q.choices.empty()) j["choices"] = q.choices;
    if (!q.truth.empty()) j["truth"] = q.truth;
    if (!q.perception.empty()) j["perception"] = q.perception;
    if (!q.reference.empty()) j["reference"] = q.reference;
    j["instance_hash"] = q.instance_hash;
    if (q.instance) j["instance"] = *q.instance;
    return j;
}

QueryRecord query_from_json(const nlohmann::json& j) {
    try {
        QueryRecord q;
        q.id = j.at("id").get<std::string>();
        q.puzzle = j.at("puzzle").get<std::string>();
        q.kind = parse_query_kind(j.at("kind").get<std::string>());
        q.modality = parse_modality(j.value("modality", std::string("image")));
        q.prompt = j.value("prompt", std::string());
        q.image_path = j.value("image_path", std::string());
        q.board = j.value("board", std::string());
        if (j.contains("target")) {
            const auto& t = j["target"];
            q.target = QueryTarget{{t.at("row").get<int>(), t.at("col").get<int>()}, t.value("value", std::string())};
        }
        if (j.contains("choices")) q.choices = j["choices"].get<std::vector<std::string>>();
        q.truth = j.value("truth", std::string());
        if (j.contains("perception")) q.perception = j["perception"].get<std::vector<std::vector<std::string>>>();
        if (j.contains("reference")) q.reference = j["reference"].get<std::vector<std::vector<std::string>>>();
        q.instance_hash = j.value("instance_hash", std::string());
        if (j.contains("instance")) q.instance = ojson::parse(j["instance"].dump());
        return q;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("query record: ") + e.what());
    }
}

std::vector<std::vector<int>> bundle_runs(int pool, int runs, int per_run, std::uint64_t seed) {
    if (runs < 1 || per_run < 1) throw Error(ErrorCode::InvalidArgument, "runs and per-run size must be positive");
    if (pool < per_run) {
        throw Error(ErrorCode::InvalidArgument, "pool of " + std::to_string(pool) + " instances is smaller than a run of " +
                                                    std::to_string(per_run));
    }
    std::vector<std::vector<int>> out;
    for (int r = 0; r < runs; ++r) {
        Rng rng(mix64(seed + static_cast<std::uint64_t>(r)));
        std::vector<int> all(pool);
        for (int i = 0; i < pool; ++i) all[i] = i;
        rng.shuffle(all);
        all.resize(per_run);
        std::sort(all.begin(), all.end());
        out.push_back(std::move(all));
    }
    return out;
}

} // namespace gridforge
