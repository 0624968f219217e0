#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyprec {

enum class ErrorKind {
    DimensionError,
    DomainError,
    EmptyInput,
    ParseError,
    DuplicateCode,
    IntegrityError,
    DateError,
    ConfigError,
    UnknownPatient,
    UnknownDoctor,
    EmptyExpertise,
    TooFewEntities,
    NotEnoughDoctors,
    DegenerateSplit,
    UsageError,
};

constexpr std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::DimensionError:   return "DimensionError";
        case ErrorKind::DomainError:      return "DomainError";
        case ErrorKind::EmptyInput:       return "EmptyInput";
        case ErrorKind::ParseError:       return "ParseError";
        case ErrorKind::DuplicateCode:    return "DuplicateCode";
        case ErrorKind::IntegrityError:   return "IntegrityError";
        case ErrorKind::DateError:        return "DateError";
        case ErrorKind::ConfigError:      return "ConfigError";
        case ErrorKind::UnknownPatient:   return "UnknownPatient";
        case ErrorKind::UnknownDoctor:    return "UnknownDoctor";
        case ErrorKind::EmptyExpertise:   return "EmptyExpertise";
        case ErrorKind::TooFewEntities:   return "TooFewEntities";
        case ErrorKind::NotEnoughDoctors: return "NotEnoughDoctors";
        case ErrorKind::DegenerateSplit:  return "DegenerateSplit";
        case ErrorKind::UsageError:       return "UsageError";
    }
    return "Error";
}

// Single exception type for all domain failures; `kind()` identifies the
// contract that was violated and is what the CLI reports on stderr.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace hyprec
