#pragma once

#include <stdexcept>
#include <string>

namespace ptgrid {

/// Process exit codes used by the command line tool.
enum class ExitCode : int { ok = 0, validation = 2, format = 3, internal = 4 };

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::internal; }
};

/// Input violates a documented precondition (coordinates out of range,
/// mismatched shapes, negative responses, ...).
class ValidationError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::validation; }
};

/// A coordinate or argument lies outside the mathematical domain of an operation.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Two batches that must agree in shape do not.
class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

enum class FormatErrc {
    bad_magic,
    unsupported,
    truncated,
    size_mismatch,
    checksum_mismatch,
    narrowing,
    schema,
    io,
};

inline const char* to_string(FormatErrc code) noexcept {
    switch (code) {
        case FormatErrc::bad_magic: return "bad magic";
        case FormatErrc::unsupported: return "unsupported";
        case FormatErrc::truncated: return "truncated";
        case FormatErrc::size_mismatch: return "size mismatch";
        case FormatErrc::checksum_mismatch: return "checksum mismatch";
        case FormatErrc::narrowing: return "narrowing not requested";
        case FormatErrc::schema: return "schema";
        case FormatErrc::io: return "io";
    }
    return "unknown";
}

/// Container or CSV content could not be read or written.
class FormatError : public Error {
public:
    FormatError(FormatErrc code, const std::string& what)
        : Error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] FormatErrc code() const noexcept { return code_; }
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::format; }

private:
    FormatErrc code_;
};

} // namespace ptgrid
