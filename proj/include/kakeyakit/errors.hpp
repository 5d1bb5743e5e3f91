#pragma once

#include <stdexcept>
#include <string>

namespace kakeyakit {

/// Raised when an operation's precondition on its arguments is violated.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace kakeyakit
