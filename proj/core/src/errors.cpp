#include "blbayes/errors.hpp"

namespace blbayes {

ChainError::ChainError(const std::string& what, long iteration)
    : ComputeError(what + " (iteration " + std::to_string(iteration) + ")"),
      iteration_(iteration) {}

}  // namespace blbayes
