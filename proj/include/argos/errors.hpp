#pragma once

#include <stdexcept>
#include <string>

namespace argos {

/// Teacher endpoint unreachable, timed out, or returned garbage. Distinct
/// from "object not found", which is a valid negative result.
class TransportError : public std::runtime_error {
  public:
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace argos
