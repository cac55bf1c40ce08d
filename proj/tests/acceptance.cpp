// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "gridforge/generator.hpp"
#include "gridforge/grader.hpp"
#include "gridforge/query.hpp"
#include "gridforge/render.hpp"
#include "gridforge/rng.hpp"
#include "gridforge/rules.hpp"
#include "gridforge/serialize.hpp"
#include "gridforge/sft.hpp"
#include "gridforge/solver.hpp"
#include "oracle.hpp"

using namespace gridforge;
using oracle::Board;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Records the first few failures; later ones only count.
struct Failures {
    int count = 0;
    std::string first;
    void add(const std::string& what) {
        if (count++ < 3) first += (first.empty() ? "" : "; ") + what;
    }
};

Board tokens_of(const PuzzleInstance& inst, const Grid& g) {
    return grid_tokens(g, inst.alphabet(), inst.definition().blocked_token);
}

// ---------------------------------------------------------------- 1

Outcome worked_examples() {
    Outcome o;
    Failures f;
    const PuzzleInstance success = fixtures::from_board("sudoku", fixtures::kSuccessStart);
    const SolveResult r = solve(success);
    if (!std::holds_alternative<Solved>(r) || tokens_of(success, std::get<Solved>(r).grid) != fixtures::kSuccessSolution) {
        f.add("solver did not return the worked solution");
    }
    const PuzzleInstance failure = fixtures::from_board("sudoku", fixtures::kFailureStart);
    if (grade_solution(fixtures::kFailureAnswer, failure)) f.add("failure grid graded correct");
    if (!grade_solution(fixtures::kSuccessSolution, success)) f.add("success grid graded incorrect");
    const SftRecord rec = emit_rsft(success);
    std::istringstream lines(rec.target);
    std::vector<std::string> steps;
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("Step ", 0) == 0) steps.push_back(line);
    }
    if (steps.size() < 2 || steps[0] != fixtures::kStep1 || steps[1] != fixtures::kStep2) {
        f.add("first step lines differ: '" + (steps.empty() ? std::string() : steps[0]) + "'");
    }
    o.pass = f.count == 0;
    o.detail = o.pass ? "solution, both grades and step lines reproduce" : f.first;
    return o;
}

// ---------------------------------------------------------------- 2

int small_side(const PuzzleDefinition& def) {
    try {
        def.check_size(3, 3);
        return 3;
    } catch (const Error&) {
        return 4;
    }
}

// Nudges one numeric clue or relation so some draws become unsatisfiable.
void perturb_structures(Structures& s, std::mt19937_64& rng) {
    std::vector<int*> ints;
    for (auto* v : {&s.row_clues, &s.col_clues, &s.top, &s.bottom, &s.left, &s.right, &s.fleet, &s.numbers}) {
        for (int& x : *v) ints.push_back(&x);
    }
    for (auto& c : s.cages) ints.push_back(&c.target);
    for (auto& w : s.walls) {
        if (w.number >= 0) ints.push_back(&w.number);
    }
    for (auto& rv : s.revealed) ints.push_back(&rv.number);
    for (auto& run : s.row_runs) {
        for (int& x : run) ints.push_back(&x);
    }
    for (auto& run : s.col_runs) {
        for (int& x : run) ints.push_back(&x);
    }
    if (!s.inequalities.empty() && rng() % 2) {
        auto& e = s.inequalities[rng() % s.inequalities.size()];
        std::swap(e.a, e.b);
        return;
    }
    if (!s.dots.empty() && rng() % 2) {
        s.dots.erase(s.dots.begin() + static_cast<long>(rng() % s.dots.size()));
        return;
    }
    if (!s.parity.empty() && rng() % 2) {
        int& p = s.parity[rng() % s.parity.size()];
        if (p >= 0) p = 1 - p;
        return;
    }
    if (ints.empty()) return;
    int& x = *ints[rng() % ints.size()];
    x += (rng() % 2) ? 1 : -1;
}

std::optional<PuzzleInstance> small_instance(const PuzzleDefinition& def, std::mt19937_64& rng) {
    const int n = small_side(def);
    const GeneratedSolution gs = generate_solution(def, n, n, rng());
    const Alphabet alphabet = def.alphabet(n, n);
    std::vector<int> open;
    for (int i = 0; i < gs.solution.size(); ++i) {
        if (!gs.solution.at(i).is_blocked()) open.push_back(i);
    }
    std::shuffle(open.begin(), open.end(), rng);
    const int empty = 1 + static_cast<int>(rng() % std::min<std::size_t>(8, open.size()));
    std::vector<Condition> conds;
    for (std::size_t k = static_cast<std::size_t>(empty); k < open.size(); ++k) {
        const Coord c = gs.solution.coord(open[k]);
        conds.push_back({c, alphabet.symbol(gs.solution.at(open[k]).value())});
    }
    Structures s = gs.structures;
    switch (rng() % 3) {
    case 0: break;
    case 1:
        if (!conds.empty()) {
            auto& cond = conds[rng() % conds.size()];
            cond.value = alphabet.symbol(static_cast<int>(rng() % alphabet.size()));
        }
        break;
    default: perturb_structures(s, rng);
    }
    try {
        return PuzzleInstance(def.id, n, n, std::move(s), std::move(conds), std::nullopt, 0, Difficulty::Easy);
    } catch (const Error&) {
        return std::nullopt;
    }
}

Outcome solver_oracle() {
    Outcome o;
    Failures f;
    int checked = 0, unsat = 0;
    for (const auto& def : registry()) {
        std::mt19937_64 rng(fnv1a64(def.id));
        int done = 0;
        while (done < 500) {
            auto inst = small_instance(def, rng);
            if (!inst) continue;
            ++done;
            ++checked;
            Board first;
            const bool oracle_sat = oracle::brute_count(*inst, 1, &first) > 0;
            const SolveResult r = solve(*inst);
            if (std::holds_alternative<BudgetExceeded>(r)) {
                f.add(def.id + ": solver budget exceeded");
                continue;
            }
            const bool solver_sat = std::holds_alternative<Solved>(r);
            unsat += !oracle_sat;
            if (solver_sat != oracle_sat) {
                f.add(def.id + ": solver says " + (solver_sat ? "sat" : "unsat") + ", enumeration disagrees");
                continue;
            }
            if (solver_sat) {
                Board got = tokens_of(*inst, std::get<Solved>(r).grid);
                bool keeps = true;
                for (const auto& c : inst->conditions()) keeps = keeps && got[c.cell.row][c.cell.col] == c.value;
                if (!keeps || !oracle::valid(def.id, inst->structures(), got)) f.add(def.id + ": solver grid rejected by oracle");
            }
        }
    }
    o.pass = f.count == 0;
    o.detail = std::to_string(checked) + " instances, " + std::to_string(unsat) + " unsatisfiable, " +
               std::to_string(f.count) + " disagreements" + (f.count ? ": " + f.first : "");
    return o;
}

// ---------------------------------------------------------------- 3

Outcome solution_count() {
    const long long expected = oracle::count_4x4_sudoku();
    const PuzzleInstance empty = fixtures::from_board("sudoku", Board(4, std::vector<std::string>(4, "*")));
    const CountResult c = count_solutions(empty, 100000);
    Outcome o;
    o.pass = !c.budget_exceeded && c.count == expected && expected == 288;
    o.detail = "enumeration " + std::to_string(expected) + ", count_solutions " + std::to_string(c.count);
    return o;
}

// ---------------------------------------------------------------- 4

Outcome generator_guarantees() {
    Failures f;
    int total = 0;
    DatasetConfig cfg;
    for (const auto& def : registry()) cfg.puzzles.push_back(def.id);
    cfg.count = 1000;
    cfg.seed = 20240601;
    cfg.difficulty = Difficulty::Easy;
    std::vector<DatasetResult> results;
    try {
        results = build_dataset(cfg);
    } catch (const Error& e) {
        return {false, std::string("build_dataset threw: ") + e.what()};
    }
    for (const auto& res : results) {
        const auto& m = res.manifest;
        const PuzzleDefinition& def = lookup(m.puzzle);
        if (static_cast<int>(res.instances.size()) != 1000) f.add(m.puzzle + ": wrong instance count");
        std::set<std::string> conditions, train_solutions, test_solutions;
        int train = 0;
        for (std::size_t i = 0; i < res.instances.size(); ++i) {
            const PuzzleInstance& inst = res.instances[i];
            const ManifestEntry& e = m.entries[i];
            ++total;
            if (!conditions.insert(conditions_hash(inst)).second) f.add(m.puzzle + ": repeated conditions");
            (e.split == "train" ? train_solutions : test_solutions).insert(solution_hash(inst));
            train += e.split == "train";
            const SolveResult r = solve(inst);
            if (!std::holds_alternative<Solved>(r)) {
                f.add(m.puzzle + ": unsolvable instance " + e.instance_hash);
            } else if (!oracle::valid(def.id, inst.structures(), tokens_of(inst, std::get<Solved>(r).grid))) {
                f.add(m.puzzle + ": solver grid rejected by oracle " + e.instance_hash);
            }
            if (!inst.solution() || !oracle::valid(def.id, inst.structures(), tokens_of(inst, *inst.solution()))) {
                f.add(m.puzzle + ": stored solution rejected by oracle");
            }
            if (def.reveal_based) {
                long long open = 0;
                for (int k = 0; k < inst.grid().size(); ++k) open += !inst.grid().at(k).is_blocked();
                const long long shown = static_cast<long long>(inst.conditions().size());
                // 1/4 <= shown/open <= 3/4, cross-multiplied.
                if (4 * shown < open || 4 * shown > 3 * open) f.add(m.puzzle + ": reveal fraction out of range");
            }
        }
        for (const auto& h : train_solutions) {
            if (test_solutions.count(h)) {
                f.add(m.puzzle + ": solution in both splits");
                break;
            }
        }
        if (train != 800) f.add(m.puzzle + ": train split has " + std::to_string(train));
    }
    return {f.count == 0, std::to_string(total) + " instances over " + std::to_string(results.size()) + " puzzles, " +
                              std::to_string(f.count) + " violations" + (f.count ? ": " + f.first : "")};
}

// ---------------------------------------------------------------- 5

// Independent line-level replay of a trajectory text.
std::string oracle_replay(const PuzzleInstance& inst, const std::string& text) {
    static const std::regex state_re(R"(^(Initial State|Resulting State|Solution): (\[\[.*\]\])$)");
    static const std::regex step_re(R"(^Step (\d+): Placing (\S+) at \((\d+), (\d+)\)\. This cell had (\d+) possible values( \((.*) were alternatives\))?$)");
    static const std::regex cell_re(R"(^Cell \((\d+), (\d+)\): (.+)$)");
    auto parse_board = [](const std::string& s) {
        Board b;
        std::string body = s.substr(2, s.size() - 4);
        std::size_t start = 0;
        while (true) {
            const auto end = body.find("], [", start);
            std::string row = body.substr(start, end == std::string::npos ? std::string::npos : end - start);
            std::vector<std::string> cells;
            std::size_t p = 0;
            while (true) {
                const auto q = row.find(", ", p);
                cells.push_back(row.substr(p, q == std::string::npos ? std::string::npos : q - p));
                if (q == std::string::npos) break;
                p = q + 2;
            }
            b.push_back(cells);
            if (end == std::string::npos) break;
            start = end + 4;
        }
        return b;
    };
    auto split_values = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t p = 0;
        while (true) {
            const auto q = s.find(", ", p);
            out.push_back(s.substr(p, q == std::string::npos ? std::string::npos : q - p));
            if (q == std::string::npos) break;
            p = q + 2;
        }
        return out;
    };
    std::istringstream in(text);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    Board board;
    std::map<Coord, std::vector<std::string>> listed;
    bool have_board = false;
    auto check_lists = [&](const Board& b) -> std::string {
        const Grid state = state_from_tokens(inst, b);
        std::set<Coord> open;
        for (int r = 0; r < inst.rows(); ++r) {
            for (int c = 0; c < inst.cols(); ++c) {
                if (b[r][c] == "*") open.insert({r, c});
            }
        }
        std::set<Coord> printed;
        for (const auto& [cell, vals] : listed) {
            printed.insert(cell);
            std::vector<std::string> fresh;
            for (int v : candidates(inst, state, cell)) fresh.push_back(inst.alphabet().symbol(v));
            if (fresh != vals) return "stale list at " + to_string(cell);
        }
        // Cells with no candidate at all have nothing to print.
        for (Coord c : open) {
            if (!printed.count(c) && !candidates(inst, state, c).empty()) return "missing list for " + to_string(c);
        }
        return "";
    };
    std::size_t i = 0;
    std::smatch m;
    int expect_step = 1;
    while (i < lines.size()) {
        const std::string& line = lines[i];
        if (std::regex_match(line, m, state_re)) {
            const Board b = parse_board(m[2]);
            if (m[1] == "Initial State") {
                if (b != oracle::start_board(inst)) return "initial board differs";
            } else if (m[1] == "Solution") {
                if (b != board) return "solution differs from last state";
                if (i + 1 != lines.size()) return "text after solution";
                if (!grade_solution(b, inst) || !oracle::valid(inst.definition_id(), inst.structures(), b)) {
                    return "solution does not solve";
                }
                return "";
            }
            board = b;
            have_board = true;
            listed.clear();
            ++i;
            while (i < lines.size() && (lines[i] == "Initial possible numbers for empty cells:" ||
                                        lines[i] == "Possible numbers for remaining empty cells:")) {
                ++i;
            }
            while (i < lines.size() && std::regex_match(lines[i], m, cell_re)) {
                listed[{std::stoi(m[1]), std::stoi(m[2])}] = split_values(m[3]);
                ++i;
            }
            if (const std::string err = check_lists(board); !err.empty()) return err;
            continue;
        }
        if (std::regex_match(line, m, step_re)) {
            if (!have_board) return "step before any state";
            if (std::stoi(m[1]) != expect_step++) return "step numbering";
            const Coord cell{std::stoi(m[3]), std::stoi(m[4])};
            const std::string value = m[2];
            const auto it = listed.find(cell);
            if (it == listed.end()) return "placed cell had no list";
            if (std::stoi(m[5]) != static_cast<int>(it->second.size())) return "candidate count differs from list";
            if (std::find(it->second.begin(), it->second.end(), value) == it->second.end()) return "value not listed";
            ++i;
            if (i >= lines.size() || !std::regex_match(lines[i], m, state_re) || m[1] != "Resulting State") {
                return "step without resulting state";
            }
            Board next = board;
            next[cell.row][cell.col] = value;
            if (parse_board(m[2]) != next) return "resulting state is not the placement";
            continue;
        }
        return "unrecognised line: " + line.substr(0, 40);
    }
    return "no solution line";
}

Outcome trajectory_replay() {
    Failures f;
    int emitted = 0, over_budget = 0;
    std::map<std::string, int> skipped;
    std::uint64_t seed = 0;
    const auto& defs = registry();
    while (emitted < 1000) {
        const PuzzleDefinition& def = defs[seed % defs.size()];
        const GeneratedInstance g = generate_instance(def.id, Difficulty::Easy, 7000 + seed);
        ++seed;
        SftRecord rec;
        try {
            rec = emit_rsft(g.instance);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TraceBudgetExceeded) {
                f.add(def.id + ": " + e.what());
                ++emitted;
            } else {
                ++over_budget;
                ++skipped[def.id];
            }
            continue;
        }
        ++emitted;
        try {
            const PrintedTrace t = parse_trace(rec.target);
            if (const std::string err = replay_trace(g.instance, t); !err.empty()) f.add(def.id + ": replay: " + err);
        } catch (const Error& e) {
            f.add(def.id + ": grammar: " + e.what());
        }
        if (const std::string err = oracle_replay(g.instance, rec.target); !err.empty()) f.add(def.id + ": oracle: " + err);
    }
    std::string skip;
    for (const auto& [id, n] : skipped) skip += (skip.empty() ? "" : ", ") + id + " " + std::to_string(n);
    return {f.count == 0, std::to_string(emitted) + " targets replayed, " + std::to_string(f.count) + " failures" +
                              (f.count ? ": " + f.first : "") + "; over the 8192-char budget and not emitted: " +
                              std::to_string(over_budget) + (skip.empty() ? "" : " (" + skip + ")")};
}

// ---------------------------------------------------------------- 6

const std::vector<std::string> kProse = {"well", "here", "is", "what", "I", "found", "after", "careful", "thought",
                                         "hope", "this", "helps", "let", "me", "know", "the", "board", "looks",
                                         "fine", "so", "we", "are", "done", "now", "okay"};

std::string prose(std::mt19937_64& rng) {
    std::string out;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) out += (k ? " " : "") + kProse[rng() % kProse.size()];
    return out;
}

std::string wrap(const std::string& response, std::mt19937_64& rng) {
    return prose(rng) + ".\n" + response + "\n" + prose(rng) + ".";
}

std::string grid_text(const Board& b, std::mt19937_64& rng, bool spell_empty) {
    static const std::vector<std::string> empties = {"0", "\"\"", ".", "_", "*", "\"*\"", "'0'"};
    std::string out = "[";
    for (std::size_t r = 0; r < b.size(); ++r) {
        out += r ? ", [" : "[";
        for (std::size_t c = 0; c < b[r].size(); ++c) {
            std::string t = b[r][c];
            if (t == "*" && spell_empty) t = empties[rng() % empties.size()];
            out += (c ? ", " : "") + t;
        }
        out += "]";
    }
    return out + "]";
}

std::string corrupt(std::string s, std::mt19937_64& rng) {
    switch (rng() % 6) {
    case 0: std::replace(s.begin(), s.end(), '"', '\''); break;
    case 1: {
        std::string out;
        bool open = true;
        for (char ch : s) {
            if (ch == '"') {
                out += open ? "\xE2\x80\x9C" : "\xE2\x80\x9D";
                open = !open;
            } else {
                out += ch;
            }
        }
        s = out;
        break;
    }
    case 2: s.erase(std::remove(s.begin(), s.end(), '"'), s.end()); break;
    case 3:
        if (!s.empty() && (s.back() == '}' || s.back() == ']')) s.pop_back();
        break;
    case 4: {
        const auto p = s.rfind(']');
        if (p != std::string::npos) s.insert(p, ",");
        break;
    }
    default: {
        const auto p = s.find('"');
        if (p != std::string::npos) s.erase(p, 1);
    }
    }
    return s;
}

Outcome grading_robustness() {
    Failures f;
    std::mt19937_64 rng(6);
    std::vector<std::pair<QueryRecord, Board>> pool;
    for (const auto& def : registry()) {
        for (int s = 0; s < 3; ++s) {
            const GeneratedInstance g = generate_instance(def.id, Difficulty::Easy, 900 + s);
            pool.push_back({emit_query(g.instance, QueryKind::DirectSolution), tokens_of(g.instance, *g.instance.solution())});
        }
    }
    std::vector<Verdict> verdicts;
    int unparseable = 0, invariance_checked = 0, token_checked = 0;
    const int kTotal = 10000;
    for (int k = 0; k < kTotal; ++k) {
        const auto& [q, solution] = pool[rng() % pool.size()];
        std::string base;
        const int shape = static_cast<int>(rng() % 5);
        Board answer = solution;
        if (rng() % 3 == 0) {
            auto& cell = answer[rng() % answer.size()][0];
            cell = cell == "1" ? "2" : "1";
        }
        const bool spell = rng() % 2;
        const std::string perception = grid_text(q.perception, rng, spell);
        switch (shape) {
        case 0: base = "{\"perception\": " + perception + ", \"answer\": " + grid_text(answer, rng, false) + "}"; break;
        case 1: base = "<think>reasoning</think>\n<answer>" + grid_text(answer, rng, false) + "</answer>"; break;
        case 2: base = "Solution: " + grid_text(answer, rng, false); break;
        case 3: base = "{\"Initial State\": \"" + perception + "\", \"Solution\": \"" + grid_text(answer, rng, false) + "\"}"; break;
        default: {
            // Noise with no structure at all.
            const int n = static_cast<int>(rng() % 60);
            for (int i = 0; i < n; ++i) base += static_cast<char>(32 + rng() % 95);
        }
        }
        const bool corrupted = shape != 4 && rng() % 2;
        if (corrupted) base = corrupt(base, rng);
        try {
            const Verdict plain = grade_record(q, base);
            const Verdict wrapped = grade_record(q, wrap(base, rng));
            verdicts.push_back(wrapped);
            if (plain.outcome == ParseOutcome::Unparseable) {
                ++unparseable;
                if (plain.correct) f.add("unparseable response counted correct");
            }
            if (shape != 4) {
                ++invariance_checked;
                if (plain.correct != wrapped.correct || plain.perception_exact != wrapped.perception_exact) {
                    f.add("grade changed under prose wrapping: " + base.substr(0, 60));
                }
            }
            // Clean answers with any empty-cell spelling in the read-back must
            // grade exactly like the plain "*" version.
            if (shape == 0 && !corrupted && spell) {
                ++token_checked;
                const Verdict canonical = grade_record(q, "{\"perception\": " + grid_text(q.perception, rng, false) +
                                                              ", \"answer\": " + grid_text(answer, rng, false) + "}");
                if (plain.perception_exact != canonical.perception_exact) {
                    f.add("empty-cell spelling changed perception grade: " + perception);
                }
            }
        } catch (const std::exception& e) {
            f.add(std::string("panic: ") + e.what());
        } catch (...) {
            f.add("panic: unknown exception");
        }
    }
    Protocol lenient;
    lenient.strict = false;
    const MetricsReport rep = aggregate(verdicts, lenient);
    if (rep.total_samples != kTotal) f.add("aggregate kept " + std::to_string(rep.total_samples) + " samples");
    return {f.count == 0, std::to_string(kTotal) + " mutated responses (" + std::to_string(unparseable) + " unparseable, " +
                              std::to_string(invariance_checked) + " wrap-invariance checks, " +
                              std::to_string(token_checked) + " token-variant checks), " + std::to_string(f.count) +
                              " failures" + (f.count ? ": " + f.first : "")};
}

// ---------------------------------------------------------------- 7

Outcome aggregation_arithmetic() {
    Failures f;
    // Run i of puzzle A has 20 - 5i correct answers: rates 1, .75, .5, .25, 0.
    std::vector<Verdict> verdicts;
    for (int run = 0; run < 5; ++run) {
        for (int k = 0; k < 20; ++k) {
            Verdict v;
            v.puzzle = "sudoku";
            v.kind = QueryKind::DirectSolution;
            v.correct = k < 20 - 5 * run;
            verdicts.push_back(v);
        }
    }
    const MetricsReport rep = aggregate(verdicts, Protocol{});
    const RateStats& s = rep.rates.at("sudoku").at("direct_solution");
    // Hand computed: mean (1+.75+.5+.25+0)/5 = .5; population variance
    // (.25+.0625+0+.0625+.25)/5 = .125.
    const double mean = 0.5, std = std::sqrt(0.125);
    if (std::abs(s.mean - mean) > 1e-12 || std::abs(s.std - std) > 1e-12) f.add("mean/std off");
    if (rep.total_samples != 100) f.add("sample count " + std::to_string(rep.total_samples));
    Protocol sample;
    sample.sample_std = true;
    const RateStats& ss = aggregate(verdicts, sample).rates.at("sudoku").at("direct_solution");
    if (std::abs(ss.std - std::sqrt(0.625 / 4)) > 1e-12) f.add("sample std off");

    const PuzzleInstance rl = fixtures::from_board("sudoku", fixtures::kRlStart);
    const Reward before = reward(fixtures::kBeforeRl, rl);
    const Reward after = reward(fixtures::kAfterRl, rl);
    if (before.success != 0 || before.format != 1 || before.perception != 0) f.add("before-RL triple");
    if (after.success != 1 || after.format != 1 || after.perception != 1) f.add("after-RL triple");

    const std::vector<double> rewards{3, 1, 2, 0, 2, 3, 1, 1};
    const std::vector<double> adv = group_advantage(rewards);
    // Direct arithmetic: mean 13/8, population variance sum((r - 13/8)^2)/8.
    double var = 0;
    for (double r : rewards) var += (r - 13.0 / 8) * (r - 13.0 / 8);
    const double sd = std::sqrt(var / 8);
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        if (std::abs(adv[i] - (rewards[i] - 13.0 / 8) / sd) > 1e-12) f.add("advantage " + std::to_string(i));
    }
    for (double a : group_advantage({2, 2, 2})) {
        if (a != 0) f.add("equal rewards give nonzero advantage");
    }
    return {f.count == 0, f.count ? f.first : "mean .5, std sqrt(.125), rewards (0,1,0)/(1,1,1), advantages exact"};
}

// ---------------------------------------------------------------- 8

Outcome render_round_trip() {
    Failures f;
    int rendered = 0, cells = 0;
    const auto& defs = registry();
    for (int k = 0; k < 200; ++k) {
        const PuzzleDefinition& def = defs[k % defs.size()];
        const Difficulty level = (k / 20) % 2 ? Difficulty::Medium : Difficulty::Easy;
        const GeneratedInstance g = generate_instance(def.id, level, 500 + k);
        const std::string a = render_svg(g.instance);
        const std::string b = render_svg(g.instance);
        if (a != b) f.add(def.id + ": renders differ");
        const Board got = oracle::read_conditions(a, def.id, g.instance.rows(), g.instance.cols());
        Board want(g.instance.rows(), std::vector<std::string>(g.instance.cols(), "*"));
        for (const auto& c : g.instance.conditions()) want[c.cell.row][c.cell.col] = c.value;
        for (int r = 0; r < g.instance.rows(); ++r) {
            for (int c = 0; c < g.instance.cols(); ++c) {
                ++cells;
                if (got[r][c] != want[r][c]) {
                    f.add(def.id + ": cell " + to_string(Coord{r, c}) + " read '" + got[r][c] + "' want '" + want[r][c] + "'");
                }
            }
        }
        ++rendered;
    }
    return {f.count == 0, std::to_string(rendered) + " renders, " + std::to_string(cells) + " cells compared, " +
                              std::to_string(f.count) + " mismatches" + (f.count ? ": " + f.first : "")};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "worked-example fixtures", 1, worked_examples},
        {2, "solver-oracle equivalence", 300, solver_oracle},
        {3, "solution count", 10, solution_count},
        {4, "generator guarantees", 600, generator_guarantees},
        {5, "trajectory replay", 600, trajectory_replay},
        {6, "grading robustness", 600, grading_robustness},
        {7, "aggregation arithmetic", 60, aggregation_arithmetic},
        {8, "render round-trip", 600, render_round_trip},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (s > c.budget_s) {
            o.pass = false;
            o.detail += "; over the " + std::to_string(static_cast<int>(c.budget_s)) + "s budget";
        }
        failed += !o.pass;
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.2fs", s);
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << secs
                  << "): " << o.detail << std::endl;
    }
    return failed ? 1 : 0;
}
