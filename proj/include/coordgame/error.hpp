#pragma once

#include <stdexcept>
#include <string>

namespace coordgame {

// Malformed input: bad file syntax, invalid node ids, colourings outside a
// node's colour set, violated preconditions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The game does not have the structure an algorithm requires (not a DAG,
// not a simple cycle, more than two colours, weighted edges, ...).
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive search would exceed its configured budget. Never reported as
// a negative answer.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coordgame
