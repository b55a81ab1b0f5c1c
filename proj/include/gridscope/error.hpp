#pragma once

#include <stdexcept>
#include <string>

namespace gridscope {

// Bad caller input: malformed files, contract violations, unknown ids.
// The CLI maps this to exit code 1; anything else is an internal error.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Lookups of ids that do not exist (entities, windows, topics).
class NotFoundError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace gridscope
