#pragma once

#include <stdexcept>
#include <string>

namespace idsgan {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an API contract (bad argument, wrong call order, bad config).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Tensor extents do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data could not be read or parsed.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

/// A persisted artifact is truncated, corrupt, or from another format version.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace idsgan
