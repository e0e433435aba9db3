#pragma once

#include <stdexcept>
#include <string>

namespace ipdyn {

// Error categories; mirrored one-to-one by the ipdyn_status codes of the C API.
enum class ErrorCode {
  io = 1,
  parse = 2,
  invalid = 3,
  rank_deficient = 4,
  estimation = 5,
  internal = 6,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorCode::io, msg);
}
[[noreturn]] inline void throw_parse(const std::string& msg) {
  throw Error(ErrorCode::parse, msg);
}
[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorCode::invalid, msg);
}
[[noreturn]] inline void throw_rank(const std::string& msg) {
  throw Error(ErrorCode::rank_deficient, msg);
}
[[noreturn]] inline void throw_estimation(const std::string& msg) {
  throw Error(ErrorCode::estimation, msg);
}

}  // namespace ipdyn
