#pragma once

#include <stdexcept>
#include <string>

namespace fmpp {

// Error taxonomy mirrored by the C API status codes: Invalid covers bad
// input data and bad configuration, Io covers file problems, Internal is
// everything that should not happen.
enum class ErrorKind { Invalid, Io, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& message) {
  throw Error(ErrorKind::Invalid, message);
}

[[noreturn]] inline void throw_io(const std::string& message) {
  throw Error(ErrorKind::Io, message);
}

[[noreturn]] inline void throw_internal(const std::string& message) {
  throw Error(ErrorKind::Internal, message);
}

inline void require(bool cond, const std::string& message) {
  if (!cond) throw_invalid(message);
}

}  // namespace fmpp
