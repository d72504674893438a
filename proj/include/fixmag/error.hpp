#pragma once

#include <stdexcept>
#include <string>

namespace fixmag {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Argument outside the open domain of a formula (e.g. rho outside (|eta|, 1)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Clone counts violating the parity constraints of a bichromatic count.
class InvalidCount : public Error {
 public:
  using Error::Error;
};

class InvalidSwitch : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration requested beyond its size limit.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class NoInteriorRoot : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace fixmag
