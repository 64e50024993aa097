#pragma once

#include <stdexcept>
#include <string>

namespace ultrabase {

/// Malformed input, unknown labels, bad parameters. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The input is well-formed but fails a mathematical requirement (not ultrametric,
/// not a metric basis, inconsistent coordinates). The CLI maps this to exit code 1.
class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace ultrabase
