#pragma once

#include <stdexcept>
#include <string>

namespace hawkes_vb {

enum class ErrorCode {
  Domain,
  Config,
  Io,
  Data,
  ZeroIntensity,
  Numerical,
  UnsupportedLink,
  SimulationDiverged,
  NoGap,
  EmptyModelSet,
  ShapeMismatch,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hawkes_vb
