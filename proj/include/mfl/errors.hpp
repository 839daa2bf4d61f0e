#pragma once

#include <stdexcept>
#include <string>

namespace mfl {

// Raised when user-supplied configuration (JSON config files, CLI arguments,
// malformed matrices) is invalid.  The CLI maps this to exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a request exceeds a documented resource ceiling (sector
// dimension, enumeration size, expansion depth).  The CLI maps this to exit
// code 3.  Guards are deliberate: the library targets desk-scale instances
// and refuses silently unbounded work.
class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mfl
