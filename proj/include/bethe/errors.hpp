#pragma once

#include <stdexcept>
#include <string>

namespace bethe {

/// Malformed or inconsistent input (bad dimensions, invalid model, parse failures).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// The computation was refused on numerical grounds: enumeration cap exceeded,
/// unnormalizable model, optimizer budget exceeded.
class NumericalRefusal : public std::runtime_error {
 public:
  explicit NumericalRefusal(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bethe
