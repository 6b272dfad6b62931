#ifndef MAFOL_ERRORS_HPP
#define MAFOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mafol {

/// Classifies every failure the library can raise; the CLI maps kinds to exit codes.
enum class ErrorKind {
  DivisionByNearZero,
  LogAtZero,
  OrderExceeded,
  ParseError,
  UnknownVariable,
  BadCodimension,
  GuardViolated,
  RankMismatch,
  RankDeficient,
  NotPlurisubharmonic,
  IllConditionedH,
  NotSameFoliation,
  UnknownEntry,
  BadInput,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DivisionByNearZero: return "DivisionByNearZero";
    case ErrorKind::LogAtZero: return "LogAtZero";
    case ErrorKind::OrderExceeded: return "OrderExceeded";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::BadCodimension: return "BadCodimension";
    case ErrorKind::GuardViolated: return "GuardViolated";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NotPlurisubharmonic: return "NotPlurisubharmonic";
    case ErrorKind::IllConditionedH: return "IllConditionedH";
    case ErrorKind::NotSameFoliation: return "NotSameFoliation";
    case ErrorKind::UnknownEntry: return "UnknownEntry";
    case ErrorKind::BadInput: return "BadInput";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace mafol

#endif
