#pragma once

#include <stdexcept>
#include <string>

namespace blcs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class UnknownEntity : public Error {
 public:
  using Error::Error;
};

class NoRelations : public Error {
 public:
  using Error::Error;
};

/// Partial spectrum reports that no completion can satisfy.
class Inconsistent : public Error {
 public:
  using Error::Error;
};

class InsufficientDisclosure : public Error {
 public:
  using Error::Error;
};

class PrivacyViolation : public Error {
 public:
  using Error::Error;
};

class LeaderQuarantined : public Error {
 public:
  using Error::Error;
};

/// Raised while loading scenarios, topologies or sweep specs; `field()` names
/// the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace blcs
