#pragma once

#include <stdexcept>
#include <string>

namespace skelwarp {

enum class ErrorKind {
  InvalidArgument,
  DegenerateOrientation,
  ObjectOverflow,
  InvalidWindow,
  SignalTooShort,
  EmptySequence,
  DimensionMismatch,
  EmptyClass,
  InsufficientSubjects,
  DegenerateData,
  ParseError,
  MissingFile,
  LabelMapError,
  ConfigError,
  VersionMismatch,
  CorruptBundle,
  NonSquareMatrix,
  InvalidSpec,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace skelwarp
