#pragma once

#include <stdexcept>
#include <string>

namespace tail {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
struct InputError : Error {
  using Error::Error;
};

/// The instance (or a node of a search) admits no feasible solution.
struct InfeasibleError : Error {
  using Error::Error;
};

/// An enumeration or search budget was exhausted.
struct LimitError : Error {
  using Error::Error;
};

}  // namespace tail
