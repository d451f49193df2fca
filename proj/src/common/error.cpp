#include "mgfusion/common/error.hpp"

namespace mgf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::empty_sequence: return "empty-sequence error";
    case ErrorKind::label: return "label error";
    case ErrorKind::contract: return "contract error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::codec: return "codec error";
    case ErrorKind::config: return "config error";
    case ErrorKind::metric: return "metric error";
    case ErrorKind::numerical: return "numerical error";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace mgf
