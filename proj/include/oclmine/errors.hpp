#pragma once

#include <stdexcept>
#include <string>

namespace oclmine {

// Input rejected before any work was done.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The cancellation token fired; partial results were discarded.
class Aborted : public std::runtime_error {
 public:
  Aborted() : std::runtime_error("run aborted by cancellation") {}
};

// DBSCAN discovered more clusters than the 13-bit id field can hold.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Worker threads (or device resources) could not be brought up.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oclmine
