#include "skelwarp/error.hpp"

namespace skelwarp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateOrientation: return "DegenerateOrientation";
    case ErrorKind::ObjectOverflow: return "ObjectOverflow";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::SignalTooShort: return "SignalTooShort";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::InsufficientSubjects: return "InsufficientSubjects";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::LabelMapError: return "LabelMapError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptBundle: return "CorruptBundle";
    case ErrorKind::NonSquareMatrix: return "NonSquareMatrix";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace skelwarp
