#pragma once

#include <stdexcept>
#include <string>

namespace qsel {

// Error taxonomy shared by all modules. Each condition the library can
// signal maps to one concrete type so callers can catch precisely.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyData : public Error {
 public:
  using Error::Error;
};

class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

class SingularSigma : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class NotEnoughPoints : public Error {
 public:
  using Error::Error;
};

class EmptyCluster : public Error {
 public:
  using Error::Error;
};

class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class TooManyFailures : public Error {
 public:
  using Error::Error;
};

class FoldTooSmall : public Error {
 public:
  using Error::Error;
};

class NoApplicableMethod : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateScatter : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsel
