#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "gridforge/instance.hpp"

namespace gridforge {

using ojson = nlohmann::ordered_json;

ojson structures_to_json(const Structures& s);
Structures structures_from_json(const nlohmann::json& j);

// Canonical object {definition_id, rows, cols, structures, conditions,
// solution?, seed, difficulty}; fixed field order, so dump() is byte stable.
ojson to_json(const PuzzleInstance& instance);

// Throws Schema on malformed input (plus whatever the instance constructor
// rejects).
PuzzleInstance instance_from_json(const nlohmann::json& j);

std::string canonical_text(const PuzzleInstance& instance);

std::string hex64(std::uint64_t h);

// Hash of the whole canonical document.
std::string instance_hash(const PuzzleInstance& instance);
// Hash of what a solver is shown: id, size, structures, conditions.
std::string conditions_hash(const PuzzleInstance& instance);
// Hash of id, size and the stored solution; throws MissingSolution.
std::string solution_hash(const PuzzleInstance& instance);

PuzzleInstance load_instance(const std::filesystem::path& path);
void save_instance(const PuzzleInstance& instance, const std::filesystem::path& path);

// Reads a whole file; throws Error(InvalidArgument) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace gridforge
