#pragma once

#include <stdexcept>
#include <string>

namespace erudite {

// Error taxonomy shared by all modules. Everything derives from std::runtime_error
// so callers that do not care about the category can catch one type.

// Invalid argument values (bad band edges, degenerate kernels, out-of-range ids).
struct parameter_error : std::runtime_error {
  explicit parameter_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input is structurally fine but too short/small for the requested operation.
struct insufficient_data_error : std::runtime_error {
  explicit insufficient_data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Domain-value validation failures (questionnaire severities, KSS range, message fields).
struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Wire/file decoding failures. `field` names the offending field when known.
struct decode_error : std::runtime_error {
  explicit decode_error(const std::string& msg, std::string field_name = "")
      : std::runtime_error(msg), field(std::move(field_name)) {}
  std::string field;
};

// Configuration problems detected at load time.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / transport failures.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace erudite
