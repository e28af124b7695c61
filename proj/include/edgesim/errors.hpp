#pragma once

#include <stdexcept>
#include <string>

namespace edgesim {

// A region ended up with no active base station covering it.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(int region_id, const std::string& what)
      : std::runtime_error(what), region_id_(region_id) {}
  int region_id() const { return region_id_; }

 private:
  int region_id_;
};

// Offered computation load reaches or exceeds a station's service rate.
class OverloadError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Exact solver asked for an instance larger than it enumerates.
class UnsupportedSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// No feasible decision exists for the slot.
class InfeasibleInstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration document (parse or validation failure).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edgesim
