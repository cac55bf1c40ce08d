#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridforge/error.hpp"

namespace gridforge {

// Zero-indexed (row, col) position.
struct Coord {
    int row = 0;
    int col = 0;

    auto operator<=>(const Coord&) const = default;
};

std::string to_string(Coord c);

// Ordered symbol set of a puzzle instance. Symbols are short strings; a cell
// stores the symbol's index. Numeric alphabets are "1".."N" and index i has
// numeric value i + 1.
class Alphabet {
public:
    Alphabet() = default;
    Alphabet(std::vector<std::string> symbols, bool numeric);

    static Alphabet numbers(int n);

    int size() const { return static_cast<int>(symbols_.size()); }
    bool numeric() const { return numeric_; }
    const std::string& symbol(int index) const;
    const std::vector<std::string>& symbols() const { return symbols_; }

    // -1 when the symbol is not part of the alphabet.
    int index_of(std::string_view symbol) const;
    bool contains(std::string_view symbol) const { return index_of(symbol) >= 0; }

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<std::string> symbols_;
    bool numeric_ = false;
};

// One cell of a state: Unknown, Assigned(symbol index) or Blocked (structural).
class CellState {
public:
    enum class Kind : std::uint8_t { Unknown, Assigned, Blocked };

    constexpr CellState() = default;

    static constexpr CellState unknown() { return CellState{}; }
    static constexpr CellState blocked() { return CellState{Kind::Blocked, 0}; }
    static constexpr CellState assigned(int value) {
        return CellState{Kind::Assigned, static_cast<std::uint8_t>(value)};
    }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_unknown() const { return kind_ == Kind::Unknown; }
    constexpr bool is_assigned() const { return kind_ == Kind::Assigned; }
    constexpr bool is_blocked() const { return kind_ == Kind::Blocked; }
    constexpr int value() const { return value_; }

    // True iff assigned to exactly this symbol index.
    constexpr bool holds(int value) const { return is_assigned() && value_ == value; }

    constexpr bool operator==(const CellState&) const = default;

private:
    constexpr CellState(Kind kind, std::uint8_t value) : kind_(kind), value_(value) {}

    Kind kind_ = Kind::Unknown;
    std::uint8_t value_ = 0;
};

// Row-major rectangular state. Value type; every coordinate access is
// bounds-checked.
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return rows_ * cols_; }

    bool in_bounds(Coord c) const {
        return c.row >= 0 && c.col >= 0 && c.row < rows_ && c.col < cols_;
    }
    int index(Coord c) const;
    Coord coord(int index) const { return {index / cols_, index % cols_}; }

    const CellState& at(Coord c) const { return cells_[index(c)]; }
    const CellState& at(int index) const {
        if (index < 0 || index >= size()) out_of_range(index);
        return cells_[index];
    }
    void set(Coord c, CellState state) { cells_[index(c)] = state; }
    void set(int index, CellState state) {
        if (index < 0 || index >= size()) out_of_range(index);
        cells_[index] = state;
    }

    const std::vector<CellState>& cells() const { return cells_; }

    int count_unknown() const;
    bool same_shape(const Grid& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool operator==(const Grid&) const = default;

private:
    [[noreturn]] void out_of_range(int index) const;

    int rows_ = 0;
    int cols_ = 0;
    std::vector<CellState> cells_;
};

// Nested-list text form, e.g. "[[3, *, *, 2], [*, 2, 3, *]]". Unknown cells
// print as "*", blocked cells as `blocked_token`.
std::string format_grid(const Grid& grid, const Alphabet& alphabet,
                        std::string_view blocked_token);

// Token matrix form of a grid, same conventions as format_grid.
std::vector<std::vector<std::string>> grid_tokens(const Grid& grid, const Alphabet& alphabet,
                                                  std::string_view blocked_token);

// Nested-list text of an arbitrary token matrix.
std::string format_tokens(const std::vector<std::vector<std::string>>& tokens);

} // namespace gridforge
