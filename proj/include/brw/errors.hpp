#pragma once

#include <stdexcept>
#include <string>

namespace brw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A group element whose normal form is malformed for its group.
class InvalidElement : public Error {
 public:
  using Error::Error;
};

/// Arguments outside an operation's domain (empty mark set, bad parameter, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling exhausted its retry limit.
class SamplingFailure : public Error {
 public:
  using Error::Error;
};

/// Too many Monte Carlo samples could not certify the transport radius.
class TruncationInsufficient : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace brw
