#include "harnack/errors.hpp"

namespace harnack {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::NonpositiveFactor: return "NonpositiveFactor";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DisconnectedInterior: return "DisconnectedInterior";
    case ErrorKind::OverlappingSets: return "OverlappingSets";
    case ErrorKind::IsolatedBoundaryVertex: return "IsolatedBoundaryVertex";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NoFarPoint: return "NoFarPoint";
    case ErrorKind::NoChain: return "NoChain";
    case ErrorKind::NoBoundary: return "NoBoundary";
    case ErrorKind::SolverDivergence: return "SolverDivergence";
    case ErrorKind::BadNesting: return "BadNesting";
    case ErrorKind::EmptyHalfBall: return "EmptyHalfBall";
    case ErrorKind::DegenerateDomain: return "DegenerateDomain";
    case ErrorKind::EmptyFreeBoundary: return "EmptyFreeBoundary";
    case ErrorKind::EmptyCone: return "EmptyCone";
    case ErrorKind::EmptySphere: return "EmptySphere";
    case ErrorKind::NoSpecialPoint: return "NoSpecialPoint";
    case ErrorKind::ConfigRejected: return "ConfigRejected";
    case ErrorKind::BadMesh: return "BadMesh";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::MissingCoordinates: return "MissingCoordinates";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace harnack
