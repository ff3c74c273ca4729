#pragma once

#include <stdexcept>
#include <string>

namespace phimin {

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFinite : std::runtime_error {
  explicit NonFinite(const std::string& msg) : std::runtime_error(msg) {}
};

struct StepFailure : std::runtime_error {
  explicit StepFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct Inconclusive : std::runtime_error {
  explicit Inconclusive(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridTooSmall : std::runtime_error {
  explicit GridTooSmall(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotMinimal : std::runtime_error {
  explicit NotMinimal(const std::string& msg) : std::runtime_error(msg) {}
};

struct BoundarySupport : std::runtime_error {
  explicit BoundarySupport(const std::string& msg) : std::runtime_error(msg) {}
};

struct SlabViolation : std::runtime_error {
  explicit SlabViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct StripViolation : std::runtime_error {
  explicit StripViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyOverlap : std::runtime_error {
  explicit EmptyOverlap(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainViolation : std::runtime_error {
  explicit DomainViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace phimin
