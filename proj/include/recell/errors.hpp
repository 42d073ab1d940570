#pragma once
#include <stdexcept>
#include <string>

namespace recell {

// exit-code convention: 0 ok, 1 internal, 2 bad config / bad geometry
enum class ExitCode : int { ok = 0, internal = 1, invalid = 2 };

struct Error : std::runtime_error {
  ExitCode code;
  explicit Error(const std::string& msg, ExitCode c = ExitCode::internal)
      : std::runtime_error(msg), code(c) {}
};

struct InvalidGeometry : Error {
  explicit InvalidGeometry(const std::string& msg) : Error(msg, ExitCode::invalid) {}
};

struct UnstableCavity : InvalidGeometry {
  using InvalidGeometry::InvalidGeometry;
};

struct NoExit : InvalidGeometry {
  // untilted recirculating cell: the beam never walks out
  using InvalidGeometry::InvalidGeometry;
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg, ExitCode::invalid) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg, ExitCode::invalid) {}
};

}  // namespace recell
