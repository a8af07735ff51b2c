#pragma once

#include <stdexcept>
#include <string>

namespace laakso_lab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested instance exceeds the configured size bounds.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Two points were required to be ancestor/descendant and are not.
class RelationError : public Error {
 public:
  using Error::Error;
};

class UnknownVertexError : public Error {
 public:
  using Error::Error;
};

// Malformed external input (JSON map tables, CLI values).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace laakso_lab
