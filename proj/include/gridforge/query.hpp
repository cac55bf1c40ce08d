#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridforge/instance.hpp"
#include "gridforge/serialize.hpp"

namespace gridforge {

enum class QueryKind { CellAt, DirectSolution, ValidAction, CoTSolution };

std::string_view to_string(QueryKind kind);
QueryKind parse_query_kind(std::string_view text);

enum class Modality { Image, Text };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view text);

struct QueryTarget {
    Coord cell;
    // ValidAction only; empty means the template's implied symbol.
    std::string value;
};

struct QueryRecord {
    std::string id;
    std::string puzzle;
    QueryKind kind = QueryKind::CellAt;
    std::string prompt;
    Modality modality = Modality::Image;
    std::string image_path;  // image modality
    std::string board;       // text modality
    std::optional<QueryTarget> target;
    std::vector<std::string> choices;  // CellAt and ValidAction answer vocabulary
    // CellAt: the expected word; ValidAction: "valid" or "invalid";
    // solution kinds: unused.
    std::string truth;
    std::vector<std::vector<std::string>> perception;  // solution kinds
    std::vector<std::vector<std::string>> reference;   // solution kinds, the stored solution
    std::string instance_hash;
    std::optional<ojson> instance;  // solution kinds, so grading is self contained
};

// Answer words of the puzzle's CellAt template.
std::vector<std::string> cell_at_choices(const PuzzleInstance& instance);

// What a CellAt query at `cell` should be answered with. Unknown cells are
// "empty", except where the template names unrevealed cells separately
// (battle-ships "unknown", field-explore "hidden").
std::string cell_at_truth(const PuzzleInstance& instance, Coord cell);

// Nested-list board with "*" for unknown cells, followed by one labelled line
// per non-empty structure field.
std::string encode_text_board(const PuzzleInstance& instance);

// Template with {Rule}, {row}, {col} and {value} filled in.
std::string fill_template(const PuzzleInstance& instance, QueryKind kind,
                          const std::optional<QueryTarget>& target);

// Throws MissingTarget when a CellAt/ValidAction query has no target (or a
// solution query has one), OutOfBounds for cells off the board, and
// CellNotAssignable for a ValidAction on a cell that is not open.
QueryRecord emit_query(const PuzzleInstance& instance, QueryKind kind,
                       const std::optional<QueryTarget>& target = std::nullopt,
                       Modality modality = Modality::Image, const std::string& image_path = "");

ojson query_to_json(const QueryRecord& q);
QueryRecord query_from_json(const nlohmann::json& j);

// Run protocol: `runs` bundles of `per_run` instance indices, each a seeded
// draw without replacement from [0, pool). Throws InvalidArgument when the
// pool is smaller than one bundle.
std::vector<std::vector<int>> bundle_runs(int pool, int runs, int per_run, std::uint64_t seed);

} // namespace gridforge
