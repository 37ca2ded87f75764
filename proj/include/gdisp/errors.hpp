#pragma once

#include <stdexcept>
#include <string>

namespace gdisp {

// Every failure carries a stable kind name; the CLI maps kinds to exit codes.
enum class ErrorKind {
  NonUnit,
  MixedRings,
  Unenumerable,
  IntegralityFailure,
  IndexOutOfRange,
  LengthUnderflow,
  NotInHmu,
  NotLocal,
  NotInSubgroup,
  NotAField,
  SearchSpaceTooLarge,
  InsufficientPrecision,
  CharNotP,
  NotInJb,
  BadDecomposition,
  NotAdjointNilpotent,
  NotCongruent,
  MalformedInput,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonUnit: return "NonUnit";
    case ErrorKind::MixedRings: return "MixedRings";
    case ErrorKind::Unenumerable: return "Unenumerable";
    case ErrorKind::IntegralityFailure: return "IntegralityFailure";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::LengthUnderflow: return "LengthUnderflow";
    case ErrorKind::NotInHmu: return "NotInHmu";
    case ErrorKind::NotLocal: return "NotLocal";
    case ErrorKind::NotInSubgroup: return "NotInSubgroup";
    case ErrorKind::NotAField: return "NotAField";
    case ErrorKind::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::CharNotP: return "CharNotP";
    case ErrorKind::NotInJb: return "NotInJb";
    case ErrorKind::BadDecomposition: return "BadDecomposition";
    case ErrorKind::NotAdjointNilpotent: return "NotAdjointNilpotent";
    case ErrorKind::NotCongruent: return "NotCongruent";
    case ErrorKind::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

/// Resource caps (search bounds, precision budgets) as opposed to violated
/// mathematical preconditions.
inline bool is_resource_error(ErrorKind k) {
  return k == ErrorKind::SearchSpaceTooLarge || k == ErrorKind::InsufficientPrecision;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace gdisp
