#include "mgrel/errors.hpp"

namespace mgrel {

std::string_view to_string(ConfigErrorKind kind) noexcept {
  switch (kind) {
    case ConfigErrorKind::syntax: return "syntax";
    case ConfigErrorKind::schema: return "schema";
    case ConfigErrorKind::dangling_reference: return "dangling_reference";
    case ConfigErrorKind::constraint: return "constraint";
  }
  return "unknown";
}

namespace {

std::string describe(ConfigErrorKind kind, const std::string& path, const std::string& reason) {
  std::string text(to_string(kind));
  text += " error";
  if (!path.empty()) text += " at " + path;
  text += ": " + reason;
  return text;
}

}  // namespace

ConfigError::ConfigError(ConfigErrorKind kind, std::string path, std::string reason)
    : std::runtime_error(describe(kind, path, reason)),
      kind_(kind),
      path_(std::move(path)),
      reason_(std::move(reason)) {}

}  // namespace mgrel
