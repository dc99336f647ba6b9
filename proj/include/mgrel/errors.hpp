#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mgrel {

// Input outside the mathematical domain of an operation (e.g. u not in (0,1)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative method failed to meet its tolerance within the iteration cap.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Malformed feeder topology or a reference to an unknown section.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index computation hit a zero denominator (N_T = 0, SAIFI = 0).
class DivisionGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reading or writing an input/output file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConfigErrorKind { syntax, schema, dangling_reference, constraint };

std::string_view to_string(ConfigErrorKind kind) noexcept;

// Scenario-file problem. `path` is a dotted JSON path such as
// "fleet.turbines[0].v_cut_in_m_s"; empty for whole-document errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string path, std::string reason);

  ConfigErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  ConfigErrorKind kind_;
  std::string path_;
  std::string reason_;
};

}  // namespace mgrel
