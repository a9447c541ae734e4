#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace afis {

enum class Errc {
    // raster
    UnsupportedFormat,
    MalformedHeader,
    TruncatedData,
    InvalidSample,
    // shared
    InvalidArgument,
    DimensionMismatch,
    // template
    PointOutOfBounds,
    BadMagic,
    BadField,
    CountMismatch,
    CorrelationMismatch,
    DuplicatePoint,
    ChecksumMismatch,
    // matcher
    IndexOutOfRange,
    ModeMismatch,
    // enrollstore
    InvalidSubjectId,
    DuplicateSubject,
    UnknownSubject,
    StoreLocked,
    // evalkit
    ZeroContained,
    ParamError,
    IoError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace afis
