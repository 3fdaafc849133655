#include "mmlab/error.hpp"

namespace mmlab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Syntax: return "Syntax";
        case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
        case ErrorKind::Arity: return "Arity";
        case ErrorKind::EmptyGrid: return "EmptyGrid";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::NonUniqueMinimum: return "NonUniqueMinimum";
        case ErrorKind::RangeError: return "RangeError";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::NoBracket: return "NoBracket";
        case ErrorKind::MaxIter: return "MaxIter";
        case ErrorKind::HypothesisViolation: return "HypothesisViolation";
        case ErrorKind::NoWitness: return "NoWitness";
        case ErrorKind::RootCountShortfall: return "RootCountShortfall";
        case ErrorKind::Validation: return "Validation";
        case ErrorKind::Io: return "Io";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

bool is_hypothesis_failure(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonUniqueMinimum:
        case ErrorKind::NoBracket:
        case ErrorKind::HypothesisViolation:
        case ErrorKind::NoWitness:
        case ErrorKind::RootCountShortfall:
            return true;
        default:
            return false;
    }
}

}  // namespace mmlab
