#include "sdgame/error.hpp"

#include <utility>

namespace sdgame {

Error::Error(std::string module, const std::string& message)
    : std::runtime_error(module + ": " + message), module_(std::move(module)), message_(message) {}

}  // namespace sdgame
