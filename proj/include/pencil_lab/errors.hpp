#pragma once

#include <stdexcept>
#include <string>

namespace pencil_lab {

// Broad failure classes, used by the CLI to pick an exit code.
enum class ErrorClass {
    InvalidInput,  // malformed or contract-violating input
    CheckFailed,   // a predicate the caller asked about is false
    Unsupported,   // input is valid but outside the supported fragment
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), cls_(cls), kind_(std::move(kind)) {}

    ErrorClass error_class() const { return cls_; }
    const std::string& kind() const { return kind_; }

private:
    ErrorClass cls_;
    std::string kind_;
};

inline Error invalid_input(const std::string& kind, const std::string& msg) {
    return Error(ErrorClass::InvalidInput, kind, msg);
}

inline Error unsupported(const std::string& kind, const std::string& msg) {
    return Error(ErrorClass::Unsupported, kind, msg);
}

} // namespace pencil_lab
