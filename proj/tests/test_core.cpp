#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gridforge/generator.hpp"
#include "gridforge/rules.hpp"
#include "gridforge/serialize.hpp"
#include "oracle.hpp"

using namespace gridforge;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Io;
}

} // namespace

TEST(Grid, BoundsAndPlacement) {
    const PuzzleInstance inst = fixtures::from_board("sudoku", fixtures::kSuccessStart);
    EXPECT_EQ(inst.open_cells(), 12);
    EXPECT_EQ(code_of([&] { apply_assignment(inst, inst.grid(), {4, 0}, "1"); }), ErrorCode::OutOfBounds);
    EXPECT_EQ(code_of([&] { apply_assignment(inst, inst.grid(), {0, 0}, "1"); }), ErrorCode::CellNotAssignable);
    const Grid next = apply_assignment(inst, inst.grid(), {0, 1}, "1");
    EXPECT_TRUE(inst.grid().at(Coord{0, 1}).is_unknown());  // value semantics
    EXPECT_EQ(format_grid(next, inst.alphabet(), ""), "[[3, 1, *, 2], [*, *, *, *], [*, *, *, *], [*, 2, 3, *]]");
}

TEST(Rules, RegistryHasTwentyPuzzles) {
    EXPECT_EQ(registry().size(), 20u);
    EXPECT_EQ(code_of([] { lookup("no-such-puzzle"); }), ErrorCode::NotRegistered);
    EXPECT_EQ(code_of([] { lookup("sudoku").check_size(5, 5); }), ErrorCode::IllegalSize);
}

TEST(Rules, CandidatesFollowRowColumnBlock) {
    const PuzzleInstance inst = fixtures::from_board("sudoku", fixtures::kSuccessStart);
    // (0,1): row has 3,2; column has 2; block has 3 -> {1,4}.
    EXPECT_EQ(candidates(inst, inst.grid(), {0, 1}), (std::vector<int>{0, 3}));
}

TEST(Rules, SolvedMatchesOracleOnGeneratedSolutions) {
    for (const auto& def : registry()) {
        const int n = def.size_for(Difficulty::Easy);
        const GeneratedSolution gs = generate_solution(def, n, n, 11);
        const PuzzleInstance inst(def.id, n, n, gs.structures, {}, gs.solution, 0, Difficulty::Easy);
        const auto tokens = grid_tokens(gs.solution, inst.alphabet(), def.blocked_token);
        EXPECT_TRUE(is_solved(inst, gs.solution)) << def.id;
        EXPECT_TRUE(oracle::valid(def.id, gs.structures, tokens)) << def.id;
    }
}

TEST(Rules, ViolationsNameOffendingCells) {
    const PuzzleInstance inst = fixtures::from_board("sudoku", fixtures::kFailureStart);
    const Grid bad = state_from_tokens(inst, fixtures::kFailureAnswer);
    EXPECT_FALSE(is_solved(inst, bad));
    const auto v = check_constraints(inst, bad);
    ASSERT_FALSE(v.empty());
    EXPECT_FALSE(v.front().offending.empty());
}

TEST(Serialize, RoundTripKeepsHashes) {
    for (const auto& def : registry()) {
        const GeneratedInstance g = generate_instance(def.id, Difficulty::Easy, 3);
        const PuzzleInstance back = instance_from_json(nlohmann::json::parse(to_json(g.instance).dump()));
        EXPECT_EQ(instance_hash(back), instance_hash(g.instance)) << def.id;
        EXPECT_EQ(back.structures(), g.instance.structures()) << def.id;
        EXPECT_EQ(back.conditions(), g.instance.conditions()) << def.id;
    }
}

TEST(Serialize, RejectsBadSchema) {
    EXPECT_EQ(code_of([] { instance_from_json(nlohmann::json{{"puzzle", "sudoku"}}); }), ErrorCode::Schema);
}
