#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridforge/instance.hpp"
#include "gridforge/rules.hpp"
#include "gridforge/serialize.hpp"
#include "gridforge/solver.hpp"

namespace gridforge {

struct Ratio {
    int num = 0;
    int den = 1;
};

struct DifficultyProfile {
    Difficulty level = Difficulty::Easy;
    int rows = 4;
    int cols = 4;
    Ratio reveal_min;
    Ratio reveal_max;
};

// Size from the definition's table, reveal interval from the level.
DifficultyProfile profile_for(const PuzzleDefinition& def, Difficulty level);

// Exact check lo <= revealed / total <= hi.
bool ratio_within(int revealed, int total, Ratio lo, Ratio hi);

struct GeneratorOptions {
    // Fraction of safe field-explore cells that show their count.
    Ratio field_reveal{1, 2};
    // Reject instances with more than one solution.
    bool require_unique = false;
    // Test hook: reveal every cell of reveal-based puzzles.
    bool reveal_all = false;
    // Overrides the profile size.
    std::optional<std::pair<int, int>> size;
    SolveLimits limits{200'000, 1, 8192, 200'000};
    int max_attempts = 200;
};

struct GeneratedSolution {
    Grid solution;
    Structures structures;
};

// Random full solution plus the structures carved from it. Deterministic in
// seed. Throws GenerationFailed when the retry budget runs out.
GeneratedSolution generate_solution(const PuzzleDefinition& def, int rows, int cols, std::uint64_t seed);

// Picks conditions (reveal-based puzzles) or revealed counts (field-explore)
// and assembles the instance; the generating solution stays attached.
PuzzleInstance reveal_clues(const PuzzleDefinition& def, const GeneratedSolution& generated,
                            const DifficultyProfile& profile, std::uint64_t seed,
                            const GeneratorOptions& options = {});

struct GeneratedInstance {
    PuzzleInstance instance;
    std::int64_t solver_nodes = 0;
};

// Full pipeline with resampling: instances the solver cannot finish within
// options.limits (or ambiguous ones when uniqueness is required) are redrawn.
GeneratedInstance generate_instance(const std::string& puzzle, Difficulty level, std::uint64_t seed,
                                    const GeneratorOptions& options = {});

struct ManifestEntry {
    std::string instance_hash;
    std::string path;
    std::string split;
    std::uint64_t seed = 0;
    std::string conditions_hash;
    std::string solution_hash;
    std::int64_t solver_nodes = 0;
};

struct DatasetManifest {
    std::string puzzle;
    Difficulty difficulty = Difficulty::Easy;
    std::vector<ManifestEntry> entries;
    std::map<std::string, int> counts;
};

struct DatasetConfig {
    std::vector<std::string> puzzles;
    Difficulty difficulty = Difficulty::Easy;
    int count = 100;
    std::uint64_t seed = 0;
    Ratio train{4, 5};
    // Root directory for instance files and manifests; empty keeps everything in memory.
    std::filesystem::path out;
    int jobs = 1;
    // Consecutive duplicate draws tolerated before giving up.
    int exhaustion_streak = 2000;
    GeneratorOptions options;
};

struct DatasetResult {
    DatasetManifest manifest;
    std::vector<PuzzleInstance> instances;  // same order as manifest entries
};

// One manifest per puzzle, train entries first. Draws repeating an accepted
// conditions hash are rejected, and all instances sharing a solution land in
// the same split. DuplicateExhaustion when too many consecutive draws are
// rejected.
std::vector<DatasetResult> build_dataset(const DatasetConfig& config);

ojson manifest_to_json(const DatasetManifest& manifest);

} // namespace gridforge
