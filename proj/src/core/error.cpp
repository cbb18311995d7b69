#include "pinv/error.hpp"

namespace pinv {

std::string_view code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonSquarePower: return "NonSquarePower";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::WeightNotPD: return "WeightNotPD";
    case ErrorCode::SingularDelta: return "SingularDelta";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::DuplicateMatrix: return "DuplicateMatrix";
    case ErrorCode::DuplicateResult: return "DuplicateResult";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::EmptyUpload: return "EmptyUpload";
    case ErrorCode::UnknownTestMatrix: return "UnknownTestMatrix";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::UnknownOperation: return "UnknownOperation";
    case ErrorCode::BadRequest: return "BadRequest";
    }
    return "Unknown";
}

} // namespace pinv
