#pragma once

#include <stdexcept>
#include <string>

namespace qbp {

// Inputs outside an operation's domain (angles, indices, sizes).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// State or operator dimensions that do not match the circuit or each other.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed graph or config files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The factor graph contains a cycle; only trees and forests are decodable.
class LoopyGraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive computation requested beyond its size limit.
class TooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qbp
