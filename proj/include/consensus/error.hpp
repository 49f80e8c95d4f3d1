#pragma once

#include <stdexcept>
#include <string>

namespace consensus {

/// Failure categories shared by the C++ core and the C API status codes.
enum class Errc {
  invalid_argument = 1,
  precondition,
  non_ergodic,
  unscalable,
  eigensolver,
  timeout,
  divergence,
  io,
  parse,
  property_violation,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace consensus
