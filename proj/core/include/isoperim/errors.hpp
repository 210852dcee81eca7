#pragma once

#include <stdexcept>
#include <string>

namespace isoperim {

/// Library-wide error carrying the originating module and a short kind tag,
/// so callers (notably the CLI) can emit machine-parsable
/// "ERROR:<module>:<kind>:<message>" lines.
class Error : public std::runtime_error {
public:
  Error(std::string module, std::string kind, const std::string& message)
      : std::runtime_error("ERROR:" + module + ":" + kind + ": " + message),
        module_(std::move(module)),
        kind_(std::move(kind)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string module_;
  std::string kind_;
};

}  // namespace isoperim
