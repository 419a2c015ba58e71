#include "ftt/deformed_math.hpp"

#include <limits>

namespace ftt {

double exp_q(double x, double q) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("exp_q: x must be finite");
  }
  if (q == 1.0) {
    return std::exp(x);
  }
  const double one_minus_q = 1.0 - q;
  const double bracket = 1.0 + one_minus_q * x;
  if (q < 1.0) {
    if (bracket <= 0.0) return 0.0;
  } else {
    if (bracket <= 0.0) {
      throw std::domain_error("exp_q: 1 + (1-q)x <= 0 on the q > 1 branch");
    }
  }
  // bracket^{1/(1-q)}, computed through log1p for accuracy near q = 1
  return std::exp(std::log1p(one_minus_q * x) / one_minus_q);
}

double ln_q(double x, double q) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("ln_q: x must be positive");
  }
  if (q == 1.0) {
    return std::log(x);
  }
  const double one_minus_q = 1.0 - q;
  return std::expm1(one_minus_q * std::log(x)) / one_minus_q;
}

}  // namespace ftt
