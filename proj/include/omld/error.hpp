#pragma once

#include <stdexcept>
#include <string>

namespace omld {

/// Root of every exception thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace omld
