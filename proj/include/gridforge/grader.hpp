#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridforge/instance.hpp"
#include "gridforge/query.hpp"

namespace gridforge {

using TokenGrid = std::vector<std::vector<std::string>>;

enum class ParseOutcome { Structured, Repaired, Unparseable };

std::string_view to_string(ParseOutcome o);

struct RepairResult {
    ParseOutcome outcome = ParseOutcome::Unparseable;
    nlohmann::json value;  // null when unparseable
};

// Lenient reader for JSON-ish text: single or double quotes, bare words,
// tuples, trailing or missing commas, unclosed strings and brackets. When prose
// surrounds the data the last complete value is taken. Never throws.
RepairResult try_repair(std::string_view text);

// As try_repair, throwing RepairFailed when nothing could be read.
nlohmann::json repair_structured(std::string_view text);

// Empty-cell spellings ("0", "", ".", "_", "*") become "*"; letters are
// lowercased; anything else that is not alphanumeric throws UnknownToken.
std::string normalize_cell_token(std::string_view token);

struct PerceptionGrade {
    bool exact = false;
    double cell_accuracy = 0;
};

// Both grids are normalised first; cells whose token cannot be normalised
// count as wrong.
PerceptionGrade grade_perception(const TokenGrid& pred, const TokenGrid& truth);

// True iff the grid is a complete state that satisfies every constraint and
// keeps every condition.
bool grade_solution(const TokenGrid& pred, const PuzzleInstance& instance);

// The answer word is the last token of the response that is one of the
// choices (or an empty-cell spelling).
bool grade_cell_at(std::string_view response, std::string_view truth,
                   const std::vector<std::string>& choices = {});
bool grade_valid_action(std::string_view response, std::string_view oracle);

struct Extracted {
    ParseOutcome outcome = ParseOutcome::Unparseable;
    std::optional<TokenGrid> perception;
    std::optional<TokenGrid> answer;
    std::optional<std::string> think;
    // Short-answer text for cell/valid-action queries.
    std::optional<std::string> short_answer;
    bool tagged = false;  // <think> and <answer> tags both present
};

Extracted extract_response(std::string_view raw);

struct Verdict {
    std::string query_id;
    std::string puzzle;
    QueryKind kind = QueryKind::CellAt;
    bool correct = false;
    ParseOutcome outcome = ParseOutcome::Unparseable;
    std::optional<bool> perception_exact;
    std::optional<double> perception_cell_accuracy;
    // Kept for length analysis; nothing is graded on them.
    std::size_t response_chars = 0;
    std::optional<std::size_t> think_chars;
};

// Grades one response to one query. Solution queries need the embedded
// instance. Never throws on response content.
Verdict grade_record(const QueryRecord& query, std::string_view raw);

ojson verdict_to_json(const Verdict& v);

// Flat per-record table with a header row.
std::string verdicts_to_csv(const std::vector<Verdict>& verdicts);

struct Protocol {
    int runs = 5;
    int per_run = 20;
    bool strict = true;       // IncompleteRun on a short group
    bool sample_std = false;  // population std by default
};

struct RateStats {
    double mean = 0;
    double std = 0;
    std::vector<double> run_rates;
    int samples = 0;
    bool partial = false;  // lenient mode filled in a short group
};

struct MetricsReport {
    // Keyed by puzzle, then by query kind name.
    std::map<std::string, std::map<std::string, RateStats>> rates;
    // Mean cell-level perception accuracy over solution queries, per puzzle.
    std::map<std::string, double> perception_cell_accuracy;
    // Per tag and kind: mean of the puzzle means carrying the tag.
    std::map<std::string, std::map<std::string, double>> taxonomy;
    int runs = 0;
    int per_run = 0;
    int total_samples = 0;
    bool lenient = false;
};

// Verdicts are grouped by (puzzle, kind) and cut into consecutive runs of
// per_run records.
MetricsReport aggregate(const std::vector<Verdict>& verdicts, const Protocol& protocol);

ojson report_to_json(const MetricsReport& report);

// CSV inputs for external plotting: bars are per puzzle and kind, radar is
// per taxonomy tag and kind.
struct PlotData {
    std::string bars;
    std::string radar;
};
PlotData plot_data(const MetricsReport& report);

struct RewardWeights {
    double success = 1;
    double format = 1;
    double perception = 1;
    bool perception_requested = true;
};

struct Reward {
    double success = 0;
    double format = 0;
    double perception = 0;
    double total = 0;
};

// success: answer solves the instance; format: <think> and <answer> tags
// present; perception: exact read-back of the initial board.
Reward reward(std::string_view response, const PuzzleInstance& instance, const RewardWeights& weights = {});
Reward reward(std::string_view response, const QueryRecord& query, const RewardWeights& weights = {});

// (r - mean) / std with population std; all zeros when every reward is equal.
// Throws GroupTooSmall below two entries.
std::vector<double> group_advantage(const std::vector<double>& rewards);

} // namespace gridforge
