#pragma once

#include <stdexcept>
#include <string>

namespace qaoa {

// Bad arguments or malformed input. CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed quantity violated an internal cross-check, e.g. an energy that
// should be real came out with a large imaginary residue. Exit code 3.
class consistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A guard against requests that would exhaust memory or run forever. Exit code 4.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const validation_error*>(&e)) return 2;
  if (dynamic_cast<const consistency_error*>(&e)) return 3;
  if (dynamic_cast<const resource_error*>(&e)) return 4;
  return 1;
}

}  // namespace qaoa
