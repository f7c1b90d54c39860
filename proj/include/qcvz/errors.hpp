#pragma once

#include <stdexcept>

namespace qcvz {

/// A numerical procedure failed: a fit did not converge, a calibration ran
/// out of iterations, or an integration step was too coarse.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcvz
