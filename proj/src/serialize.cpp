#include "gridforge/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridforge/rng.hpp"

namespace gridforge {

namespace {

using json = nlohmann::json;

ojson coord_json(Coord c) { return ojson::array({c.row, c.col}); }

Coord coord_from(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw Error(ErrorCode::Schema, "expected [row, col], got " + j.dump());
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<int> ints_from(const json& j, const char* what) {
    if (!j.is_array()) throw Error(ErrorCode::Schema, std::string(what) + " must be an array");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw Error(ErrorCode::Schema, std::string(what) + " must hold integers");
        out.push_back(v.get<int>());
    }
    return out;
}

const json& field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw Error(ErrorCode::Schema, std::string("missing field '") + name + "'");
    return *it;
}

std::string hash_of(const ojson& j) { return hex64(fnv1a64(j.dump())); }

ojson solution_json(const PuzzleInstance& instance) {
    return ojson(state_tokens(instance, *instance.solution()));
}

} // namespace

ojson structures_to_json(const Structures& s) {
    ojson j = ojson::object();
    if (!s.regions.empty()) j["regions"] = s.regions;
    if (!s.cages.empty()) {
        auto& arr = j["cages"] = ojson::array();
        for (const Cage& c : s.cages) {
            ojson cells = ojson::array();
            for (Coord x : c.cells) cells.push_back(coord_json(x));
            arr.push_back({{"cells", cells}, {"target", c.target}});
        }
    }
    if (!s.row_clues.empty()) j["row_clues"] = s.row_clues;
    if (!s.col_clues.empty()) j["col_clues"] = s.col_clues;
    if (!s.top.empty()) j["top"] = s.top;
    if (!s.bottom.empty()) j["bottom"] = s.bottom;
    if (!s.left.empty()) j["left"] = s.left;
    if (!s.right.empty()) j["right"] = s.right;
    if (!s.row_runs.empty()) j["row_runs"] = s.row_runs;
    if (!s.col_runs.empty()) j["col_runs"] = s.col_runs;
    auto edges = [](const std::vector<Edge>& es) {
        ojson arr = ojson::array();
        for (const Edge& e : es) arr.push_back(ojson::array({coord_json(e.a), coord_json(e.b)}));
        return arr;
    };
    if (!s.inequalities.empty()) j["inequalities"] = edges(s.inequalities);
    if (!s.dots.empty()) j["dots"] = edges(s.dots);
    if (!s.parity.empty()) j["parity"] = s.parity;
    if (!s.thermometers.empty()) {
        auto& arr = j["thermometers"] = ojson::array();
        for (const auto& path : s.thermometers) {
            ojson cells = ojson::array();
            for (Coord x : path) cells.push_back(coord_json(x));
            arr.push_back(cells);
        }
    }
    if (!s.trees.empty()) {
        auto& arr = j["trees"] = ojson::array();
        for (Coord t : s.trees) arr.push_back(coord_json(t));
    }
    if (!s.walls.empty()) {
        auto& arr = j["walls"] = ojson::array();
        for (const Wall& w : s.walls) arr.push_back({{"cell", coord_json(w.cell)}, {"number", w.number}});
    }
    if (!s.fleet.empty()) j["fleet"] = s.fleet;
    if (!s.revealed.empty()) {
        auto& arr = j["revealed"] = ojson::array();
        for (const Revealed& r : s.revealed) arr.push_back({{"cell", coord_json(r.cell)}, {"number", r.number}});
    }
    if (!s.numbers.empty()) j["numbers"] = s.numbers;
    return j;
}

Structures structures_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::Schema, "structures must be an object");
    static const std::vector<std::string> known = {
        "regions", "cages", "row_clues", "col_clues", "top",   "bottom",   "left",   "right",
        "row_runs", "col_runs", "inequalities", "dots", "parity", "thermometers", "trees", "walls",
        "fleet", "revealed", "numbers"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw Error(ErrorCode::Schema, "unknown structure field '" + it.key() + "'");
        }
    }
    Structures s;
    auto ints = [&](const char* name, std::vector<int>& out) {
        if (j.contains(name)) out = ints_from(j[name], name);
    };
    ints("regions", s.regions);
    ints("row_clues", s.row_clues);
    ints("col_clues", s.col_clues);
    ints("top", s.top);
    ints("bottom", s.bottom);
    ints("left", s.left);
    ints("right", s.right);
    ints("parity", s.parity);
    ints("fleet", s.fleet);
    ints("numbers", s.numbers);
    auto runs = [&](const char* name, std::vector<std::vector<int>>& out) {
        if (!j.contains(name)) return;
        if (!j[name].is_array()) throw Error(ErrorCode::Schema, std::string(name) + " must be an array");
        for (const auto& line : j[name]) out.push_back(ints_from(line, name));
    };
    runs("row_runs", s.row_runs);
    runs("col_runs", s.col_runs);
    if (j.contains("cages")) {
        for (const auto& c : j["cages"]) {
            Cage cage;
            for (const auto& x : field(c, "cells")) cage.cells.push_back(coord_from(x));
            const auto& t = field(c, "target");
            if (!t.is_number_integer()) throw Error(ErrorCode::Schema, "cage target must be an integer");
            cage.target = t.get<int>();
            s.cages.push_back(std::move(cage));
        }
    }
    auto edges = [&](const char* name, std::vector<Edge>& out) {
        if (!j.contains(name)) return;
        for (const auto& e : j[name]) {
            if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::Schema, std::string(name) + " entries are pairs");
            out.push_back({coord_from(e[0]), coord_from(e[1])});
        }
    };
    edges("inequalities", s.inequalities);
    edges("dots", s.dots);
    if (j.contains("thermometers")) {
        for (const auto& path : j["thermometers"]) {
            std::vector<Coord> cells;
            for (const auto& x : path) cells.push_back(coord_from(x));
            s.thermometers.push_back(std::move(cells));
        }
    }
    if (j.contains("trees")) {
        for (const auto& t : j["trees"]) s.trees.push_back(coord_from(t));
    }
    if (j.contains("walls")) {
        for (const auto& w : j["walls"]) {
            s.walls.push_back({coord_from(field(w, "cell")), field(w, "number").get<int>()});
        }
    }
    if (j.contains("revealed")) {
        for (const auto& r : j["revealed"]) {
            s.revealed.push_back({coord_from(field(r, "cell")), field(r, "number").get<int>()});
        }
    }
    return s;
}

ojson to_json(const PuzzleInstance& instance) {
    ojson j;
    j["definition_id"] = instance.definition_id();
    j["rows"] = instance.rows();
    j["cols"] = instance.cols();
    j["structures"] = structures_to_json(instance.structures());
    ojson conds = ojson::array();
    for (const Condition& c : instance.conditions()) {
        conds.push_back({{"row", c.cell.row}, {"col", c.cell.col}, {"value", c.value}});
    }
    j["conditions"] = conds;
    if (instance.solution()) j["solution"] = solution_json(instance);
    j["seed"] = instance.seed();
    j["difficulty"] = std::string(to_string(instance.difficulty()));
    return j;
}

PuzzleInstance instance_from_json(const json& j) {
    try {
        if (!j.is_object()) throw Error(ErrorCode::Schema, "instance must be a JSON object");
        const std::string id = field(j, "definition_id").get<std::string>();
        const int rows = field(j, "rows").get<int>();
        const int cols = field(j, "cols").get<int>();
        Structures s = j.contains("structures") ? structures_from_json(j["structures"]) : Structures{};
        std::vector<Condition> conds;
        if (j.contains("conditions")) {
            for (const auto& c : j["conditions"]) {
                conds.push_back({{field(c, "row").get<int>(), field(c, "col").get<int>()},
                                 field(c, "value").get<std::string>()});
            }
        }
        std::uint64_t seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : 0;
        Difficulty d = j.contains("difficulty") ? parse_difficulty(j["difficulty"].get<std::string>())
                                                : Difficulty::Easy;
        std::optional<Grid> solution;
        if (j.contains("solution") && !j["solution"].is_null()) {
            // Parse through a provisional instance so tokens map onto the alphabet.
            PuzzleInstance shape(id, rows, cols, s, conds, std::nullopt, seed, d);
            auto tokens = j["solution"].get<std::vector<std::vector<std::string>>>();
            solution = state_from_tokens(shape, tokens);
        }
        return PuzzleInstance(id, rows, cols, std::move(s), std::move(conds), std::move(solution), seed, d);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("malformed instance: ") + e.what());
    }
}

std::string canonical_text(const PuzzleInstance& instance) { return to_json(instance).dump(); }

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string instance_hash(const PuzzleInstance& instance) { return hash_of(to_json(instance)); }

std::string conditions_hash(const PuzzleInstance& instance) {
    ojson j = to_json(instance);
    j.erase("solution");
    j.erase("seed");
    j.erase("difficulty");
    return hash_of(j);
}

std::string solution_hash(const PuzzleInstance& instance) {
    if (!instance.solution()) throw Error(ErrorCode::MissingSolution, "instance has no stored solution");
    ojson j;
    j["definition_id"] = instance.definition_id();
    j["rows"] = instance.rows();
    j["cols"] = instance.cols();
    j["solution"] = solution_json(instance);
    return hash_of(j);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
}

PuzzleInstance load_instance(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::Schema, path.string() + " is not valid JSON");
    return instance_from_json(j);
}

void save_instance(const PuzzleInstance& instance, const std::filesystem::path& path) {
    write_file(path, to_json(instance).dump(2) + "\n");
}

} // namespace gridforge
