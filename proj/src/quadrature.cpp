#include "outage/quadrature.hpp"

#include <sstream>

namespace outage {

void QuadratureSpec::validate() const {
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0)) throw std::invalid_argument("quadrature tolerances must be >= 0");
  if (!(abs_tol > 0.0) && !(rel_tol > 0.0)) {
    throw std::invalid_argument("at least one quadrature tolerance must be positive");
  }
  if (max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be >= 1");
}

namespace {
std::string convergence_message(const std::string& axis, double achieved, double requested) {
  std::ostringstream os;
  os << "quadrature did not converge along " << axis << ": error estimate " << achieved << " > tolerance "
     << requested;
  return os.str();
}
}  // namespace

ConvergenceError::ConvergenceError(const std::string& axis, double achieved, double requested)
    : std::runtime_error(convergence_message(axis, achieved, requested)), axis_(axis), achieved_(achieved) {}

}  // namespace outage
