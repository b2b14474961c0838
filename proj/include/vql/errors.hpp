#pragma once

#include <stdexcept>
#include <string>

namespace vql {

// Error categories, aligned with the CLI exit codes (0 ok, 2 config,
// 3 size cap, 4 evolver failure).
enum class ErrorCode {
  dimension = 2,
  config = 2,
  size_cap = 3,
  evolver = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }
  int exit_code() const { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

inline Error dimension_error(const std::string& what) {
  return Error(ErrorCode::dimension, what);
}
inline Error config_error(const std::string& what) {
  return Error(ErrorCode::config, what);
}
inline Error size_cap_error(const std::string& what) {
  return Error(ErrorCode::size_cap, what);
}
inline Error evolver_error(const std::string& what) {
  return Error(ErrorCode::evolver, what);
}

}  // namespace vql
