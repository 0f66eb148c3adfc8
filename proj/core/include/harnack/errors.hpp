#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace harnack {

enum class ErrorKind {
  DisconnectedGraph,
  NonpositiveWeight,
  DuplicateEdge,
  NonpositiveFactor,
  InvalidArgument,
  DisconnectedInterior,
  OverlappingSets,
  IsolatedBoundaryVertex,
  Unreachable,
  Infeasible,
  NoFarPoint,
  NoChain,
  NoBoundary,
  SolverDivergence,
  BadNesting,
  EmptyHalfBall,
  DegenerateDomain,
  EmptyFreeBoundary,
  EmptyCone,
  EmptySphere,
  NoSpecialPoint,
  ConfigRejected,
  BadMesh,
  EmptyInterior,
  MissingCoordinates,
  ConfigParse,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can separate precondition rejections from genuine faults.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace harnack
