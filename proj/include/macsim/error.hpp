#pragma once

#include <stdexcept>
#include <string>

namespace macsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (variable specs, run parameters, plans).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// X/Y alignment cannot be established (missing true match, duplicate ids).
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// m/u/g cannot be estimated from the given matrix (no matched pairs, etc).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// m/u/g admit no valid transition parameters.
class InfeasibleMarginalsError : public Error {
 public:
  using Error::Error;
};

/// A function was called outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace macsim
