#pragma once

#include <stdexcept>
#include <string>

namespace semshift {

// Raised for anything traceable to user input: unreadable or malformed
// files, unknown words, bad parameter combinations. The CLI maps these to
// exit code 1; anything else escaping to main is an internal error (exit 2).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal contract (a bug, not a user mistake).
class invariant_error : public std::logic_error {
public:
    explicit invariant_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace semshift
