#pragma once

#include <stdexcept>
#include <string>

namespace mgf {

enum class ErrorKind {
  dimension,
  parameter,
  empty_sequence,
  label,
  contract,
  parse,
  validation,
  codec,
  config,
  metric,
  numerical,
  io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind` drives the C API status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace mgf
