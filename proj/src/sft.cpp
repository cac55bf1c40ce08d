#include "gridforge/sft.hpp"

#include <algorithm>
#include <charconv>

#include "gridforge/rules.hpp"
#include "gridforge/serialize.hpp"

namespace gridforge {

namespace {

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::Schema, "trace line " + std::to_string(line + 1) + ": " + what);
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

int to_int(std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorCode::Schema, "bad number '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) break;
        start = p + sep.size();
    }
    return out;
}

// "[[a, b], [c, d]]"
TokenMatrix parse_matrix(std::string_view s) {
    if (s.size() < 4 || !starts_with(s, "[[") || s.substr(s.size() - 2) != "]]") {
        throw Error(ErrorCode::Schema, "expected a nested list, got '" + std::string(s) + "'");
    }
    TokenMatrix m;
    for (const auto& row : split(s.substr(2, s.size() - 4), "], [")) m.push_back(split(row, ", "));
    return m;
}

// "(r, c)"
Coord parse_cell(std::string_view s) {
    if (s.size() < 6 || s.front() != '(' || s.back() != ')') throw Error(ErrorCode::Schema, "bad cell '" + std::string(s) + "'");
    const auto parts = split(s.substr(1, s.size() - 2), ", ");
    if (parts.size() != 2) throw Error(ErrorCode::Schema, "bad cell '" + std::string(s) + "'");
    return {to_int(parts[0]), to_int(parts[1])};
}

// "Cell (r, c): v1, v2"
PrintedCandidates parse_candidate_line(std::string_view s) {
    if (!starts_with(s, "Cell ")) throw Error(ErrorCode::Schema, "expected a Cell line");
    // Dead-end cells in undone branches print with no values.
    PrintedCandidates pc;
    if (s.size() > 6 && s.substr(s.size() - 2) == "):") {
        pc.cell = parse_cell(s.substr(5, s.size() - 6));
        return pc;
    }
    const auto colon = s.find("): ");
    if (colon == std::string_view::npos) throw Error(ErrorCode::Schema, "Cell line without values");
    pc.cell = parse_cell(s.substr(5, colon - 4));
    pc.values = split(s.substr(colon + 3), ", ");
    return pc;
}

std::vector<PrintedCandidates> fresh_candidates(const PuzzleInstance& instance, const Grid& state) {
    const Alphabet& alphabet = instance.alphabet();
    std::vector<PrintedCandidates> out;
    for (const CellCandidates& cc : candidate_map(instance, state)) {
        PrintedCandidates pc{cc.cell, {}};
        for (int v : cc.values) pc.values.push_back(alphabet.symbol(v));
        out.push_back(std::move(pc));
    }
    return out;
}

} // namespace

std::string_view to_string(SftKind kind) { return kind == SftKind::S ? "s" : "r"; }

SftKind parse_sft_kind(std::string_view text) {
    if (text == "s" || text == "S" || text == "s-sft") return SftKind::S;
    if (text == "r" || text == "R" || text == "r-sft") return SftKind::R;
    throw Error(ErrorCode::InvalidArgument, "sft kind must be s or r, got '" + std::string(text) + "'");
}

SftRecord emit_ssft(const PuzzleInstance& instance, const SftOptions& options) {
    if (!instance.solution()) throw Error(ErrorCode::MissingSolution, "instance carries no solution");
    const QueryRecord q = emit_query(instance, QueryKind::DirectSolution, std::nullopt, options.modality, options.image_path);
    SftRecord r;
    r.prompt = q.prompt;
    r.image_path = q.image_path;
    r.kind = SftKind::S;
    r.instance_hash = q.instance_hash;
    r.puzzle = q.puzzle;
    r.target = "{\"answer\": " +
               format_grid(*instance.solution(), instance.alphabet(), instance.definition().blocked_token) + "}";
    return r;
}

SftRecord emit_rsft(const PuzzleInstance& instance, const SolveLimits& limits, const SftOptions& options) {
    const TraceResult result = solve_with_trace(instance, limits);
    if (const auto* b = std::get_if<BudgetExceeded>(&result)) throw Error(ErrorCode::TraceBudgetExceeded, b->reason);
    if (std::holds_alternative<Unsat>(result)) throw Error(ErrorCode::Unsatisfiable, "instance has no solution to trace");
    const Trajectory& t = std::get<Trajectory>(result);
    const QueryRecord q = emit_query(instance, QueryKind::CoTSolution, std::nullopt, options.modality, options.image_path);
    SftRecord r;
    r.prompt = q.prompt;
    r.image_path = q.image_path;
    r.kind = SftKind::R;
    r.instance_hash = q.instance_hash;
    r.puzzle = q.puzzle;
    r.target = render_trajectory(instance, t, options.include_backtracked);
    if (r.target.size() > limits.max_trace_chars) {
        throw Error(ErrorCode::TraceBudgetExceeded, "trace of " + std::to_string(r.target.size()) + " chars exceeds " +
                                                        std::to_string(limits.max_trace_chars));
    }
    return r;
}

ojson sft_to_json(const SftRecord& record) {
    ojson j;
    j["prompt"] = record.prompt;
    if (!record.image_path.empty()) j["image_path"] = record.image_path;
    j["target"] = record.target;
    j["meta"] = {{"kind", std::string(to_string(record.kind))},
                 {"puzzle", record.puzzle},
                 {"instance_hash", record.instance_hash}};
    return j;
}

PrintedTrace parse_trace(std::string_view text) {
    const std::vector<std::string> lines = split(text, "\n");
    PrintedTrace t;
    std::size_t i = 0;
    auto at = [&](std::size_t k) -> std::string_view { return k < lines.size() ? std::string_view(lines[k]) : ""; };
    auto read_cells = [&](std::vector<PrintedCandidates>& dst) {
        while (i < lines.size() && starts_with(lines[i], "Cell ")) {
            try {
                dst.push_back(parse_candidate_line(lines[i]));
            } catch (const Error& e) {
                bad_line(i, e.what());
            }
            ++i;
        }
    };
    try {
        if (!starts_with(at(i), "Initial State: ")) bad_line(i, "expected 'Initial State: '");
        t.initial = parse_matrix(at(i).substr(15));
        ++i;
        if (at(i) == "Initial possible numbers for empty cells:") {
            ++i;
            read_cells(t.initial_candidates);
        }
        int pending_backtrack = -1;
        while (i < lines.size()) {
            std::string_view line = at(i);
            if (starts_with(line, "Solution: ")) {
                t.solution = parse_matrix(line.substr(10));
                if (i + 1 != lines.size()) bad_line(i + 1, "text after the Solution line");
                return t;
            }
            if (starts_with(line, "Backtrack to step ")) {
                pending_backtrack = to_int(line.substr(18));
                ++i;
                continue;
            }
            if (!starts_with(line, "Step ")) bad_line(i, "expected a Step line");
            PrintedStep s;
            s.backtrack_to = pending_backtrack;
            pending_backtrack = -1;
            const auto colon = line.find(": Placing ");
            const auto at_pos = line.find(" at (");
            const auto had = line.find(". This cell had ");
            if (colon == std::string_view::npos || at_pos == std::string_view::npos || had == std::string_view::npos) {
                bad_line(i, "malformed Step line");
            }
            s.number = to_int(line.substr(5, colon - 5));
            s.value = std::string(line.substr(colon + 10, at_pos - colon - 10));
            s.cell = parse_cell(line.substr(at_pos + 4, had - at_pos - 4));
            std::string_view rest = line.substr(had + 16);
            const auto pv = rest.find(" possible values");
            if (pv == std::string_view::npos) bad_line(i, "missing 'possible values'");
            s.candidate_count = to_int(rest.substr(0, pv));
            rest = rest.substr(pv + 16);
            if (!rest.empty()) {
                if (!starts_with(rest, " (") || rest.size() < 20 || rest.substr(rest.size() - 19) != " were alternatives)") {
                    bad_line(i, "malformed alternatives");
                }
                s.alternatives = split(rest.substr(2, rest.size() - 21), ", ");
            }
            ++i;
            if (!starts_with(at(i), "Resulting State: ")) bad_line(i, "expected 'Resulting State: '");
            s.state = parse_matrix(at(i).substr(17));
            ++i;
            if (at(i) == "Possible numbers for remaining empty cells:") {
                ++i;
                read_cells(s.candidates);
            }
            t.steps.push_back(std::move(s));
        }
    } catch (const Error& e) {
        if (std::string_view(e.what()).find("trace line") != std::string_view::npos) throw;
        bad_line(i, e.what());
    }
    bad_line(lines.size() - 1, "missing 'Solution: ' line");
}

std::string replay_trace(const PuzzleInstance& instance, const PrintedTrace& trace) {
    const Alphabet& alphabet = instance.alphabet();
    const std::string& blocked = instance.definition().blocked_token;
    auto tokens = [&](const Grid& g) { return grid_tokens(g, alphabet, blocked); };
    Grid state = instance.grid();
    if (tokens(state) != trace.initial) return "initial state differs from the instance";
    if (fresh_candidates(instance, state) != trace.initial_candidates) return "initial candidate lists are stale";
    std::vector<Grid> states{state};  // by printed step number
    for (const PrintedStep& s : trace.steps) {
        const std::string where = "step " + std::to_string(s.number) + ": ";
        if (s.number != static_cast<int>(states.size())) return where + "numbering out of sequence";
        if (s.backtrack_to >= 0) {
            if (s.backtrack_to >= static_cast<int>(states.size())) return where + "backtrack to an unknown step";
            state = states[s.backtrack_to];
        }
        if (!state.in_bounds(s.cell) || !state.at(s.cell).is_unknown()) return where + "cell is not open";
        const std::vector<int> before = candidates(instance, state, s.cell);
        if (static_cast<int>(before.size()) != s.candidate_count) return where + "candidate count differs";
        std::vector<std::string> alternatives;
        bool listed = false;
        for (int v : before) {
            if (alphabet.symbol(v) == s.value) listed = true;
            else alternatives.push_back(alphabet.symbol(v));
        }
        if (!listed) return where + "placed value was not a candidate";
        if (alternatives != s.alternatives) return where + "alternatives differ";
        try {
            state = apply_assignment(instance, state, s.cell, s.value);
        } catch (const Error& e) {
            return where + e.what();
        }
        if (tokens(state) != s.state) return where + "resulting state differs";
        if (fresh_candidates(instance, state) != s.candidates) return where + "candidate lists are stale";
        states.push_back(state);
    }
    if (tokens(state) != trace.solution) return "solution line differs from the last state";
    if (!is_solved(instance, state)) return "final state does not solve the instance";
    return "";
}

} // namespace gridforge
