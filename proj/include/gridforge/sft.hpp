#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gridforge/query.hpp"
#include "gridforge/solver.hpp"

namespace gridforge {

enum class SftKind { S, R };

std::string_view to_string(SftKind kind);
SftKind parse_sft_kind(std::string_view text);

struct SftOptions {
    Modality modality = Modality::Image;
    std::string image_path;
    bool include_backtracked = false;  // R targets only
};

struct SftRecord {
    std::string prompt;
    std::string image_path;
    std::string target;
    SftKind kind = SftKind::S;
    std::string instance_hash;
    std::string puzzle;
};

// Target is exactly {"answer": [[...]]} built from the stored solution.
// Throws MissingSolution.
SftRecord emit_ssft(const PuzzleInstance& instance, const SftOptions& options = {});

// Target is the rendered solver trajectory. Throws TraceBudgetExceeded when the
// search or the text does not fit limits, Unsatisfiable when there is nothing
// to trace.
SftRecord emit_rsft(const PuzzleInstance& instance, const SolveLimits& limits = {},
                    const SftOptions& options = {});

// One JSONL line: {prompt, image_path?, target, meta}.
ojson sft_to_json(const SftRecord& record);

using TokenMatrix = std::vector<std::vector<std::string>>;

struct PrintedCandidates {
    Coord cell;
    std::vector<std::string> values;
    bool operator==(const PrintedCandidates&) const = default;
};

struct PrintedStep {
    int number = 0;
    int backtrack_to = -1;  // printed "Backtrack to step k" right before, else -1
    std::string value;
    Coord cell;
    int candidate_count = 0;
    std::vector<std::string> alternatives;
    TokenMatrix state;
    std::vector<PrintedCandidates> candidates;
};

struct PrintedTrace {
    TokenMatrix initial;
    std::vector<PrintedCandidates> initial_candidates;
    std::vector<PrintedStep> steps;
    TokenMatrix solution;
};

// Strict reader for the trajectory text. Throws Schema naming the offending
// line.
PrintedTrace parse_trace(std::string_view text);

// Replays a parsed trace against the instance: every printed state must equal
// the state reached by applying the printed placements, every candidate list
// must equal a fresh candidates() call and the final grid must solve the
// instance. Returns the first discrepancy, empty when the trace is faithful.
std::string replay_trace(const PuzzleInstance& instance, const PrintedTrace& trace);

} // namespace gridforge
