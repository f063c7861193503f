#pragma once

#include <stdexcept>
#include <string>

namespace keyflow {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration documents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated files (.flo, meta.json, trace JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Sequence-level inconsistencies: frame out of range, missing flow,
// dimension mismatch, trajectory leaving the frame.
class SequenceError : public Error {
 public:
  using Error::Error;
};

// The cheap non-keyframe path could not produce a usable box.
class PropagationError : public Error {
 public:
  using Error::Error;
};

// Metric inputs that do not line up.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Violated internal precondition (empty candidate list, length mismatch).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace keyflow
