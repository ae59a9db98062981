#pragma once

#include <stdexcept>
#include <string>

namespace eed {

/// Error type thrown by all eed operations. The message is a single line
/// suitable for machine-parseable CLI output.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

}  // namespace eed
