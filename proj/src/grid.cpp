#include "gridforge/grid.hpp"

#include <algorithm>

namespace gridforge {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::CellNotAssignable: return "CellNotAssignable";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotRegistered: return "NotRegistered";
    case ErrorCode::IllegalSize: return "IllegalSize";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::DuplicateExhaustion: return "DuplicateExhaustion";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::MissingSolution: return "MissingSolution";
    case ErrorCode::TraceBudgetExceeded: return "TraceBudgetExceeded";
    case ErrorCode::UnsupportedStructure: return "UnsupportedStructure";
    case ErrorCode::RepairFailed: return "RepairFailed";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::IncompleteRun: return "IncompleteRun";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Unsatisfiable: return "Unsatisfiable";
    }
    return "Unknown";
}

std::string to_string(Coord c) {
    return "(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")";
}

Alphabet::Alphabet(std::vector<std::string> symbols, bool numeric)
    : symbols_(std::move(symbols)), numeric_(numeric) {
    if (symbols_.empty() || symbols_.size() > 64) {
        throw Error(ErrorCode::InvalidArgument, "alphabet size must be in [1, 64]");
    }
}

Alphabet Alphabet::numbers(int n) {
    std::vector<std::string> symbols;
    for (int i = 1; i <= n; ++i) symbols.push_back(std::to_string(i));
    return Alphabet(std::move(symbols), true);
}

const std::string& Alphabet::symbol(int index) const {
    if (index < 0 || index >= size()) {
        throw Error(ErrorCode::InvalidArgument, "symbol index out of alphabet range");
    }
    return symbols_[index];
}

int Alphabet::index_of(std::string_view symbol) const {
    auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
    return it == symbols_.end() ? -1 : static_cast<int>(it - symbols_.begin());
}

Grid::Grid(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 2 || cols < 2) {
        throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 rows and 2 columns");
    }
    cells_.assign(static_cast<std::size_t>(rows) * cols, CellState::unknown());
}

int Grid::index(Coord c) const {
    if (!in_bounds(c)) {
        throw Error(ErrorCode::OutOfBounds, "cell " + to_string(c) + " outside " +
                                                std::to_string(rows_) + "x" +
                                                std::to_string(cols_) + " grid");
    }
    return c.row * cols_ + c.col;
}

void Grid::out_of_range(int index) const {
    throw Error(ErrorCode::OutOfBounds, "cell index " + std::to_string(index) + " out of range");
}

int Grid::count_unknown() const {
    return static_cast<int>(std::count_if(cells_.begin(), cells_.end(),
                                          [](const CellState& s) { return s.is_unknown(); }));
}

std::vector<std::vector<std::string>> grid_tokens(const Grid& grid, const Alphabet& alphabet,
                                                  std::string_view blocked_token) {
    std::vector<std::vector<std::string>> out(grid.rows());
    for (int r = 0; r < grid.rows(); ++r) {
        out[r].reserve(grid.cols());
        for (int c = 0; c < grid.cols(); ++c) {
            const CellState& s = grid.at(Coord{r, c});
            if (s.is_unknown()) {
                out[r].emplace_back("*");
            } else if (s.is_blocked()) {
                out[r].emplace_back(blocked_token);
            } else {
                out[r].push_back(alphabet.symbol(s.value()));
            }
        }
    }
    return out;
}

std::string format_tokens(const std::vector<std::vector<std::string>>& tokens) {
    std::string out = "[";
    for (std::size_t r = 0; r < tokens.size(); ++r) {
        if (r) out += ", ";
        out += '[';
        for (std::size_t c = 0; c < tokens[r].size(); ++c) {
            if (c) out += ", ";
            out += tokens[r][c];
        }
        out += ']';
    }
    out += ']';
    return out;
}

std::string format_grid(const Grid& grid, const Alphabet& alphabet,
                        std::string_view blocked_token) {
    return format_tokens(grid_tokens(grid, alphabet, blocked_token));
}

} // namespace gridforge
