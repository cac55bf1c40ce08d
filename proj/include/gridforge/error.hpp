#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridforge {

enum class ErrorCode {
    OutOfBounds,
    CellNotAssignable,
    ShapeMismatch,
    NotRegistered,
    IllegalSize,
    GenerationFailed,
    DuplicateExhaustion,
    MissingTarget,
    MissingSolution,
    TraceBudgetExceeded,
    UnsupportedStructure,
    RepairFailed,
    UnknownToken,
    GroupTooSmall,
    IncompleteRun,
    InvalidArgument,
    Schema,
    Io,
    Unsatisfiable,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace gridforge
