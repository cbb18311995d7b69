#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pinv {

enum class ErrorCode {
    ParseError,
    RaggedRows,
    Empty,
    LengthMismatch,
    IndexOutOfRange,
    NonFinite,
    DimensionMismatch,
    NonSquarePower,
    NotSquare,
    NotSymmetric,
    NotPositiveDefinite,
    WeightNotPD,
    SingularDelta,
    Singular,
    StoreUnavailable,
    CorruptRecord,
    DuplicateMatrix,
    DuplicateResult,
    TooLong,
    EmptyUpload,
    UnknownTestMatrix,
    UnknownId,
    UnknownOperation,
    BadRequest,
};

/// Wire name of an error code, e.g. "DimensionMismatch".
std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const { return code_name(code_); }

private:
    ErrorCode code_;
};

} // namespace pinv
