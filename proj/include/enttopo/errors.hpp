#pragma once

#include <stdexcept>
#include <string>

namespace enttopo {

/// A vertex id that is out of range or refers to a deleted vertex.
class InvalidVertexError : public std::invalid_argument {
public:
  explicit InvalidVertexError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// A node whose color class is empty was used where a nonempty class is
/// required.
class EmptyClassError : public std::invalid_argument {
public:
  explicit EmptyClassError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Fewer than two nonempty color classes (or no mutually reachable pair):
/// inter-node aggregates are undefined.
class DegenerateTopologyError : public std::invalid_argument {
public:
  explicit DegenerateTopologyError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// A request exceeds a hard resource limit (e.g. the statevector qubit cap).
class CapacityError : public std::runtime_error {
public:
  explicit CapacityError(const std::string& what)
      : std::runtime_error(what) {}
};

/// An experiment configuration failed validation. Carries the offending
/// field name so the CLI can point at it.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

} // namespace enttopo
