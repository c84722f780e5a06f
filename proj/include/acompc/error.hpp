#pragma once

#include <stdexcept>
#include <string>

namespace acompc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad specification, bad document, out-of-range parameter.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Document could not be parsed; carries the offending location in the message.
class ParseError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// Model evaluation produced a non-finite value.
class ModelError : public Error {
public:
  using Error::Error;
};

/// Least-squares design matrix is rank deficient or too ill-conditioned.
class DegenerateDesignError : public Error {
public:
  using Error::Error;
};

/// A search would exceed its enumeration budget.
class BudgetError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace acompc
