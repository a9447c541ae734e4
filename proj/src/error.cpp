#include "afis/error.hpp"

namespace afis {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TruncatedData: return "TruncatedData";
    case Errc::InvalidSample: return "InvalidSample";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::PointOutOfBounds: return "PointOutOfBounds";
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadField: return "BadField";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::CorrelationMismatch: return "CorrelationMismatch";
    case Errc::DuplicatePoint: return "DuplicatePoint";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ModeMismatch: return "ModeMismatch";
    case Errc::InvalidSubjectId: return "InvalidSubjectId";
    case Errc::DuplicateSubject: return "DuplicateSubject";
    case Errc::UnknownSubject: return "UnknownSubject";
    case Errc::StoreLocked: return "StoreLocked";
    case Errc::ZeroContained: return "ZeroContained";
    case Errc::ParamError: return "ParamError";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace afis
