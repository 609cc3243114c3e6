#pragma once

#include <stdexcept>
#include <string>

namespace cousinlab {

/// Error type thrown by every operation in this library.
/// Messages carry enough context (node indices, offending values) to
/// locate the failure without a debugger.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cousinlab
