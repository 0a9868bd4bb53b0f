#pragma once

#include <stdexcept>
#include <string>

namespace gasnet {

enum class ErrorKind {
    Argument,    // bad inputs to an operation
    Validation,  // network / scenario file inconsistency
    Physics,     // non-physical state reached (negative density, inadmissible EOS, ...)
    Stability,   // time step violates the stability bound
    Io,          // file read/write failure
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message, std::string context = {})
        : std::runtime_error(context.empty() ? message : message + " [" + context + "]"),
          kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::Argument: return "argument";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Physics: return "physics";
        case ErrorKind::Stability: return "stability";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace gasnet
