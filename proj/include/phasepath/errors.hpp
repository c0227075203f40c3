#pragma once

#include <stdexcept>
#include <string>

namespace phasepath {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PHASEPATH_ERROR(Name)                  \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    };

PHASEPATH_ERROR(InvalidGrid)
PHASEPATH_ERROR(GridTooCoarse)
PHASEPATH_ERROR(GridTooNarrow)
PHASEPATH_ERROR(GridMismatch)
PHASEPATH_ERROR(DegenerateSuperposition)
PHASEPATH_ERROR(IntervalOutsideGrid)
PHASEPATH_ERROR(InvalidArgument)
PHASEPATH_ERROR(ResolutionError)
PHASEPATH_ERROR(NotNormalized)
PHASEPATH_ERROR(ShearOutOfRange)
PHASEPATH_ERROR(InconsistentGeometry)
PHASEPATH_ERROR(MonitorDropout)
PHASEPATH_ERROR(IntervalOutsideScan)
PHASEPATH_ERROR(OverlapOutOfRange)
PHASEPATH_ERROR(FitDiverged)
PHASEPATH_ERROR(InsufficientPoints)
PHASEPATH_ERROR(NoFringesDetected)
PHASEPATH_ERROR(AreaOutOfRange)
PHASEPATH_ERROR(MissingPlane)
PHASEPATH_ERROR(IoError)

#undef PHASEPATH_ERROR

/// Configuration problems carry the offending line and field.
class ConfigError : public Error {
public:
    ConfigError(const std::string& message, int line = 0, std::string field = {})
        : Error(format(message, line, field)), line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& message, int line, const std::string& field) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!field.empty()) out += "[" + field + "] ";
        return out + message;
    }

    int line_;
    std::string field_;
};

}  // namespace phasepath
