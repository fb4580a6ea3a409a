#pragma once

#include <stdexcept>
#include <string>

namespace sdgame {

/// Error raised by a library module. `module()` names the component that
/// rejected the input (model, lattice, snell, game, measure, certify,
/// oracle, instances, cli) so front ends can report where a run failed.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message);

  const std::string& module() const noexcept { return module_; }
  /// The message without the module prefix that what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string module_;
  std::string message_;
};

}  // namespace sdgame
