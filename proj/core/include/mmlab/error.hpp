#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmlab {

enum class ErrorKind {
    Syntax,
    UnknownIdentifier,
    Arity,
    EmptyGrid,
    InvalidArgument,
    NonFinite,
    NonUniqueMinimum,
    RangeError,
    DomainError,
    NoBracket,
    MaxIter,
    HypothesisViolation,
    NoWitness,
    RootCountShortfall,
    Validation,
    Io,
    Parse,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Findings that mean "a hypothesis of the underlying theorem failed on this
// input" rather than "the input or the program is broken".
bool is_hypothesis_failure(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string context = {})
        : std::runtime_error(message), kind_(kind), context_(std::move(context)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& context() const noexcept { return context_; }

private:
    ErrorKind kind_;
    std::string context_;
};

// Parse errors carry the byte offset of the offending token.
class SyntaxError : public Error {
public:
    SyntaxError(ErrorKind kind, const std::string& message, std::size_t position)
        : Error(kind, message, "position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message, std::string context = {}) {
    throw Error(kind, message, std::move(context));
}

}  // namespace mmlab
