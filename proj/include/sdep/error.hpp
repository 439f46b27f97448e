#pragma once

#include <stdexcept>
#include <string>

namespace sdep {

/// Input or parameter rejected by a module invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sdep
