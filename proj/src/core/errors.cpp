#include "bohmflow/errors.hpp"

namespace bohmflow {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

ConfinementError::ConfinementError(const std::string& message, double time)
    : NumericalError(message), time_(time) {}

}  // namespace bohmflow
