#include "qpn/error.hpp"

namespace qpn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Capability: return "capability error";
    case ErrorKind::Truncation: return "truncation error";
    case ErrorKind::Resolution: return "resolution error";
    case ErrorKind::Coverage: return "coverage error";
    case ErrorKind::ZeroWeight: return "zero-weight error";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Contract: return "numerical contract violation";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qpn
