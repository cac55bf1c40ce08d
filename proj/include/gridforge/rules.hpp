#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridforge/constraint.hpp"
#include "gridforge/instance.hpp"

namespace gridforge {

enum class Tag { Counting, Arithmetic, Comparison, Matching, Unidirectionality, Connectivity, Uniqueness };

std::string_view to_string(Tag tag);

struct QueryTemplates {
    std::string cell_at;
    std::string direct_solution;
    std::string valid_action;
    std::string cot_solution;
};

struct PuzzleDefinition {
    using Builder = std::vector<Constraint> (*)(int rows, int cols, const Structures&);
    using SizeCheck = void (*)(const PuzzleDefinition&, int rows, int cols);

    std::string id;
    std::vector<Tag> taxonomy;
    // Token alphabet; empty for numeric puzzles, whose alphabet is 1..cols.
    std::vector<std::string> symbols;
    // Display token of Blocked cells (light-up walls, trees); empty if none.
    std::string blocked_token;
    bool reveal_based = false;
    // Default side length per difficulty; 0 where the level does not exist.
    std::array<int, 3> sizes{};
    // Structure fields this puzzle reads.
    std::vector<std::string> structure_schema;
    std::string rule_prompt;
    QueryTemplates templates;
    // Value implied by a valid-action template that has no {value} slot.
    std::string action_symbol;

    SizeCheck size_check = nullptr;
    Builder builder = nullptr;

    bool numeric() const { return symbols.empty(); }
    Alphabet alphabet(int rows, int cols) const;
    void check_size(int rows, int cols) const;
    int size_for(Difficulty d) const;
    std::vector<Constraint> instantiate(int rows, int cols, const Structures& s) const;
    // Cells that are structural (never assignable) under these structures.
    std::vector<int> blocked_cells(int rows, int cols, const Structures& s) const;
};

const std::vector<PuzzleDefinition>& registry();

// Throws NotRegistered listing the valid ids.
const PuzzleDefinition& lookup(std::string_view id);

std::vector<Tag> taxonomy_of(std::string_view id);

nlohmann::ordered_json catalog();

} // namespace gridforge
