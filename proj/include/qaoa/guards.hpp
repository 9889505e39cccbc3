#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "qaoa/errors.hpp"

namespace qaoa {

// Real part of a nominally real complex result. The energy sums cancel their
// imaginary parts structurally; a residue above the guard means an
// implementation or input problem, not noise worth silently dropping.
inline double real_with_guard(std::complex<double> e, const char* what) {
  const double scale = std::max(1.0, std::abs(e.real()));
  if (!(std::abs(e.imag()) <= 1e-8 * scale)) {
    throw consistency_error(std::string(what) + ": imaginary residue exceeds guard, |imag| = " +
                            std::to_string(std::abs(e.imag())));
  }
  return e.real();
}

}  // namespace qaoa
