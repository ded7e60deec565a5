#pragma once

#include <stdexcept>
#include <string>

namespace splitfeas {

/// Thrown when vector or matrix dimensions do not line up.
class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an algorithm precondition (step-size bound, requirements on the
/// linear map, convexity assumption) is violated and not explicitly overridden.
class RequirementError : public std::runtime_error {
public:
  explicit RequirementError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace splitfeas
