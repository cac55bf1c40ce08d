#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "gridforge/generator.hpp"
#include "gridforge/grader.hpp"
#include "gridforge/query.hpp"
#include "gridforge/rules.hpp"
#include "gridforge/sft.hpp"

using namespace gridforge;

TEST(Repair, ReadsJsonish) {
    EXPECT_EQ(try_repair(R"({"a": [1, 2]})").outcome, ParseOutcome::Structured);
    const RepairResult r = try_repair("{'answer': [[1, 2], [2, 1]],}");
    EXPECT_EQ(r.outcome, ParseOutcome::Repaired);
    EXPECT_EQ(r.value["answer"][1][0], 2);
    EXPECT_EQ(try_repair("the answer is [[1, *], [*, 1]").value[0][1], "*");
    EXPECT_EQ(try_repair("no data here at all").outcome, ParseOutcome::Unparseable);
    EXPECT_THROW(repair_structured(""), Error);
}

TEST(Repair, UnclosedObjectBeforeProse) {
    const RepairResult r = try_repair("{\"answer\": \"[[1, 2], [2, 1]]\"\nhope this helps.");
    ASSERT_TRUE(r.value.is_object());
    EXPECT_EQ(r.value["answer"], "[[1, 2], [2, 1]]");
}

TEST(Tokens, EmptySpellingsCollapse) {
    for (const char* t : {"0", "", ".", "_", "*"}) EXPECT_EQ(normalize_cell_token(t), "*") << t;
    EXPECT_EQ(normalize_cell_token("S"), "s");
    EXPECT_THROW(normalize_cell_token("#"), Error);
}

TEST(Grade, PerceptionAccuracy) {
    const PerceptionGrade g = grade_perception({{"1", "0"}, {"2", "x"}}, {{"1", "*"}, {"2", "1"}});
    EXPECT_FALSE(g.exact);
    EXPECT_DOUBLE_EQ(g.cell_accuracy, 0.75);
    EXPECT_TRUE(grade_perception({{"."}}, {{"*"}}).exact);
}

TEST(Grade, WorkedFailureOutput) {
    const Extracted e = extract_response(fixtures::kFailureOutput);
    ASSERT_TRUE(e.answer && e.perception);
    EXPECT_EQ(*e.perception, fixtures::kFailureStart);
    EXPECT_EQ(*e.answer, fixtures::kFailureAnswer);
    const PuzzleInstance inst = fixtures::from_board("sudoku", fixtures::kFailureStart);
    EXPECT_FALSE(grade_solution(*e.answer, inst));
}

TEST(Grade, ShortAnswers) {
    EXPECT_TRUE(grade_cell_at("I think the cell holds 3", "3", {"1", "2", "3", "4", "empty"}));
    EXPECT_TRUE(grade_cell_at("It is empty.", "empty", {"1", "2", "3", "4", "empty"}));
    EXPECT_FALSE(grade_cell_at("maybe 2, no wait, 4", "2", {"1", "2", "3", "4", "empty"}));
    EXPECT_TRUE(grade_valid_action("That move is Invalid", "invalid"));
    EXPECT_FALSE(grade_valid_action("valid? no, invalid", "valid"));
}

TEST(Grade, RecordNeverThrows) {
    const auto g = generate_instance("sudoku", Difficulty::Easy, 3);
    const QueryRecord q = emit_query(g.instance, QueryKind::DirectSolution);
    for (const char* raw : {"", "{", "[[[[", "\"", "<answer>", "{'answer': [[1,", "\x01\x02\xff"}) {
        const Verdict v = grade_record(q, raw);
        EXPECT_FALSE(v.correct) << raw;
    }
    const std::string good = "{\"answer\": " + format_grid(*g.instance.solution(), g.instance.alphabet(), "") + "}";
    EXPECT_TRUE(grade_record(q, good).correct);
    const Verdict tagged = grade_record(q, "<think>abcd</think><answer>" + good + "</answer>");
    EXPECT_EQ(tagged.response_chars, 36 + good.size());
    EXPECT_EQ(tagged.think_chars, 4u);
    EXPECT_FALSE(grade_record(q, good).think_chars);
}

TEST(Aggregate, StrictAndLenient) {
    std::vector<Verdict> v(30);
    for (auto& x : v) x.puzzle = "sudoku", x.kind = QueryKind::CellAt;
    EXPECT_THROW(aggregate(v, Protocol{}), Error);
    Protocol lenient;
    lenient.strict = false;
    const MetricsReport r = aggregate(v, lenient);
    EXPECT_EQ(r.total_samples, 30);
    EXPECT_TRUE(r.rates.at("sudoku").at("cell_at").partial);
    EXPECT_FALSE(r.taxonomy.empty());
}

TEST(Reward, WorkedRlExamples) {
    const PuzzleInstance inst = fixtures::from_board("sudoku", fixtures::kRlStart);
    const Reward before = reward(fixtures::kBeforeRl, inst);
    EXPECT_EQ(before.success + before.format + before.perception, 1);
    const Reward after = reward(fixtures::kAfterRl, inst);
    EXPECT_EQ(after.total, 3);
    RewardWeights w;
    w.format = -1;
    EXPECT_THROW(reward(fixtures::kAfterRl, inst, w), Error);
    EXPECT_THROW(group_advantage({1.0}), Error);
}

TEST(Sft, SupervisedTargetIsTheSolution) {
    const auto g = generate_instance("sudoku", Difficulty::Easy, 8);
    const SftRecord s = emit_ssft(g.instance);
    EXPECT_EQ(s.target, "{\"answer\": " + format_grid(*g.instance.solution(), g.instance.alphabet(), "") + "}");
    const PuzzleInstance bare = fixtures::from_board("sudoku", fixtures::kSuccessStart);
    EXPECT_THROW(emit_ssft(bare), Error);
}

TEST(Sft, ReasoningTargetReplays) {
    for (const auto& def : registry()) {
        if (def.id == "trees-and-tents") continue;  // easy traces overrun the default budget
        const auto g = generate_instance(def.id, Difficulty::Easy, 12);
        const SftRecord r = emit_rsft(g.instance);
        EXPECT_LE(r.target.size(), 8192u);
        EXPECT_EQ(replay_trace(g.instance, parse_trace(r.target)), "") << def.id;
    }
}

TEST(Sft, BudgetAndTampering) {
    const PuzzleInstance inst = fixtures::from_board("sudoku", fixtures::kSuccessStart);
    SolveLimits tight;
    tight.max_trace_chars = 100;
    try {
        emit_rsft(inst, tight);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TraceBudgetExceeded);
    }
    std::string text = emit_rsft(inst).target;
    const auto p = text.find("This cell had 1 possible values");
    ASSERT_NE(p, std::string::npos);
    text.replace(p + 14, 1, "2");
    EXPECT_NE(replay_trace(inst, parse_trace(text)), "");
    EXPECT_THROW(parse_trace("Initial State: nonsense"), Error);
}

TEST(Sft, BacktrackedTraceParses) {
    const auto g = generate_instance("sudoku", Difficulty::Medium, 4);
    const TraceResult t = solve_with_trace(g.instance, SolveLimits{2'000'000, 1, 1 << 20, 200'000});
    ASSERT_TRUE(std::holds_alternative<Trajectory>(t));
    const std::string text = render_trajectory(g.instance, std::get<Trajectory>(t), true);
    EXPECT_EQ(replay_trace(g.instance, parse_trace(text)), "");
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Sft, WorkedTraceMatchesGolden) {
    const PuzzleInstance inst = fixtures::from_board("sudoku", fixtures::kSuccessStart);
    const std::string text = emit_rsft(inst).target;
    EXPECT_EQ(text, slurp(GOLDEN_DIR "/trace_worked_sudoku.txt"));
    // The published example flattens newlines to spaces; its visible head
    // and tail must appear verbatim.
    std::string flat = text;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    const std::string head =
        "Initial State: [[3, *, *, 2], [*, *, *, *], [*, *, *, *], [*, 2, 3, *]] Initial possible numbers for empty "
        "cells: Cell (0, 1): 1, 4 Cell (0, 2): 1, 4 Cell (1, 1): 1, 4 Cell (1, 2): 1, 4 Cell (2, 0): 1, 4 Cell (2, 3): "
        "1, 4 Cell (3, 0): 1, 4 Cell (3, 3): 1, 4 Cell (1, 0): 1, 2, 4 Cell (1, 3): 1, 3, 4 Cell (2, 1): 1, 3, 4 Cell "
        "(2, 2): 1, 2, 4 Step 1: Placing 1 at (0, 1). This cell had 2 possible values (4 were alternatives) Resulting "
        "State: [[3, 1, *, 2], [*, *, *, *], [*, *, *, *], [*, 2, 3, *]] Possible numbers for remaining empty cells: "
        "Cell (0, 2): 4 Cell (1, 1): 4 Cell (1, 0): 2, 4 Cell (1, 2): 1, 4 Cell (2, 0): 1, 4 Cell (2, 1): 3, 4 Cell "
        "(2, 3): 1, 4 Cell (3, 0): 1, 4 Cell (3, 3): 1, 4 Cell (1, 3): 1, 3, 4 Cell (2, 2): 1, 2, 4 Step 2: Placing 4 "
        "at (0, 2). This cell had 1 possible values Resulting State: [[3, 1, 4, 2], [*, *, *, *], [*, *, *, *], [*, "
        "2, 3, *]] Possible numbers for remaining empty cells: Cell (1, 1): 4 Cell (1, 2): 1 Cell (1, 0): 2, 4 Cell "
        "(1, 3): 1, 3 Cell (2, 0): 1, 4 Cell (2, 1): 3, 4 Cell (2, 2): 1, 2 Cell (2, 3): 1, 4 Cell (3, 0): 1, 4 Cell "
        "(3, 3): 1, 4 Step 3: Placing 4 at (1, 1). This cell had 1 possible values Resulting State: [[3, 1, 4, 2], ";
    const std::string tail =
        "Possible numbers for remaining empty cells: Cell (2, 0): 1, 4 Cell (2, 3): 1, 4 Cell (3, 0): 1, 4 Cell (3, "
        "3): 1, 4 Step 9: Placing 1 at (2, 0). This cell had 2 possible values (4 were alternatives) Resulting State: "
        "[[3, 1, 4, 2], [2, 4, 1, 3], [1, 3, 2, *], [*, 2, 3, *]] Possible numbers for remaining empty cells: Cell "
        "(2, 3): 4 Cell (3, 0): 4 Cell (3, 3): 1, 4 Step 10: Placing 4 at (2, 3). This cell had 1 possible values "
        "Resulting State: [[3, 1, 4, 2], [2, 4, 1, 3], [1, 3, 2, 4], [*, 2, 3, *]] Possible numbers for remaining "
        "empty cells: Cell (3, 0): 4 Cell (3, 3): 1 Step 11: Placing 4 at (3, 0). This cell had 1 possible values "
        "Resulting State: [[3, 1, 4, 2], [2, 4, 1, 3], [1, 3, 2, 4], [4, 2, 3, *]] Possible numbers for remaining "
        "empty cells: Cell (3, 3): 1 Step 12: Placing 1 at (3, 3). This cell had 1 possible values Resulting State: "
        "[[3, 1, 4, 2], [2, 4, 1, 3], [1, 3, 2, 4], [4, 2, 3, 1]] Solution: [[3, 1, 4, 2], [2, 4, 1, 3], [1, 3, 2, "
        "4], [4, 2, 3, 1]]";
    EXPECT_EQ(flat.rfind(head, 0), 0u);
    ASSERT_GE(flat.size(), tail.size());
    EXPECT_EQ(flat.substr(flat.size() - tail.size()), tail);
}

TEST(Sft, AnswerTargetForTheExampleGrid) {
    const fixtures::Board sol = {{"1", "2", "3", "4"}, {"3", "4", "1", "2"}, {"2", "1", "4", "3"}, {"4", "3", "2", "1"}};
    fixtures::Board start = sol;
    start[0][0] = start[1][2] = start[3][3] = "*";
    const PuzzleInstance bare = fixtures::from_board("sudoku", start);
    const PuzzleInstance inst("sudoku", 4, 4, {}, bare.conditions(), state_from_tokens(bare, sol), 0, Difficulty::Easy);
    const SftRecord r = emit_ssft(inst);
    EXPECT_EQ(r.target, "{\"answer\": [[1, 2, 3, 4], [3, 4, 1, 2], [2, 1, 4, 3], [4, 3, 2, 1]]}");
    const auto back = repair_structured(r.target);
    TokenGrid grid;
    for (const auto& row : back["answer"]) {
        grid.emplace_back();
        for (const auto& c : row) grid.back().push_back(c.is_string() ? c.get<std::string>() : c.dump());
    }
    EXPECT_TRUE(grade_solution(grid, inst));
}

TEST(Sft, TrajectoryJsonMatchesText) {
    const PuzzleInstance inst = fixtures::from_board("sudoku", fixtures::kSuccessStart);
    const TraceResult t = solve_with_trace(inst);
    const ojson j = trajectory_to_json(inst, std::get<Trajectory>(t));
    const PrintedTrace p = parse_trace(emit_rsft(inst).target);
    ASSERT_EQ(j["steps"].size(), p.steps.size());
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        EXPECT_EQ(j["steps"][i]["value"], p.steps[i].value);
        EXPECT_EQ(j["steps"][i]["resulting_state"].get<TokenMatrix>(), p.steps[i].state);
    }
}
