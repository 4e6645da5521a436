#pragma once

#include <stdexcept>
#include <string>

namespace mmt {

// Shape or size disagreement between tensors/files; message names the offending shapes.
struct DimError : std::runtime_error {
  explicit DimError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller violated an operation precondition (empty input, id out of range, ...).
struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent configuration / command usage.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mmt
