#pragma once

#include <stdexcept>
#include <string>

namespace agcore {

// Bad input: malformed files, dimension mismatches, invalid parameters.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariant (a solver bug, never a consequence of user input).
class InternalError : public std::logic_error {
  public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

} // namespace agcore
