#pragma once

#include <stdexcept>
#include <string>

namespace qpn {

enum class ErrorKind {
  Parameter,
  Parse,
  Io,
  Capability,
  Truncation,
  Resolution,
  Coverage,
  ZeroWeight,
  Range,
  Contract,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a Fock-space truncation leaves more weight outside the
/// cutoff than allowed. Carries a cutoff that would satisfy the bound.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int suggested_cutoff)
      : Error(ErrorKind::Truncation, what), suggested_(suggested_cutoff) {}
  int suggested_cutoff() const noexcept { return suggested_; }

 private:
  int suggested_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::Parameter, what);
}

}  // namespace qpn
