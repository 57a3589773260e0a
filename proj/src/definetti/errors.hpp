#ifndef DEFINETTI_ERRORS_HPP
#define DEFINETTI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace definetti {

enum class ErrorKind {
  NotInterior,
  RankDeficient,
  DimensionOverflow,
  EnumerationOverflow,
  SupportMismatch,
  EnclosureTooWide,
  InfeasibleRelaxation,
  NoFeasibleTerm,
  LiftInconsistent,
  Degenerate,
  ShapeMismatch,
  SolverFailure,
  ParseError,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotInterior:          return "NotInterior";
    case ErrorKind::RankDeficient:        return "RankDeficient";
    case ErrorKind::DimensionOverflow:    return "DimensionOverflow";
    case ErrorKind::EnumerationOverflow:  return "EnumerationOverflow";
    case ErrorKind::SupportMismatch:      return "SupportMismatch";
    case ErrorKind::EnclosureTooWide:     return "EnclosureTooWide";
    case ErrorKind::InfeasibleRelaxation: return "InfeasibleRelaxation";
    case ErrorKind::NoFeasibleTerm:       return "NoFeasibleTerm";
    case ErrorKind::LiftInconsistent:     return "LiftInconsistent";
    case ErrorKind::Degenerate:           return "Degenerate";
    case ErrorKind::ShapeMismatch:        return "ShapeMismatch";
    case ErrorKind::SolverFailure:        return "SolverFailure";
    case ErrorKind::ParseError:           return "ParseError";
  }
  return "Unknown";
}

/// Library error carrying a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace definetti

#endif
