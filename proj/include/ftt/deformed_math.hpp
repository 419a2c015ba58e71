#pragma once

#include <cmath>
#include <stdexcept>

namespace ftt {

// Deformation parameter of the q-exponential family. q = 1 recovers the
// ordinary exp/log pair; q < 1 gives truncating (sparse) behavior and
// 1 < q < 3 heavy tails. q >= 3 is rejected (the q-Gaussian built on it
// would not normalize).
class EntropicIndex {
 public:
  explicit EntropicIndex(double q) : q_(q) {
    if (!(q < 3.0)) {
      throw std::invalid_argument("EntropicIndex: q must be < 3");
    }
  }

  double value() const noexcept { return q_; }
  bool is_gaussian() const noexcept { return q_ == 1.0; }
  bool is_sparse() const noexcept { return q_ < 1.0; }
  bool is_heavy_tailed() const noexcept { return q_ > 1.0; }

 private:
  double q_;
};

// Deformed exponential exp_q(x) = [1 + (1-q)x]_+^{1/(1-q)}, exp at q = 1.
// For q < 1 the bracket is clamped at zero, so the result is exactly 0 for
// x <= -1/(1-q). For q > 1 the expression diverges as the bracket
// approaches zero from above; a non-positive bracket is a domain error.
// The raw-index overloads exist because internal maps (the generalized
// Box-Muller companion index) can land at or beyond 3, where the function
// pair is still well defined even though no q-Gaussian is.
double exp_q(double x, double q);
double ln_q(double x, double q);

inline double exp_q(double x, EntropicIndex q) { return exp_q(x, q.value()); }

// Deformed logarithm ln_q(x) = (x^{1-q} - 1)/(1-q) for x > 0, ln at q = 1.
// Inverse of exp_q on the positive part of its range.
inline double ln_q(double x, EntropicIndex q) { return ln_q(x, q.value()); }

// Largest x (for q < 1) at or below which exp_q(x, q) is exactly zero.
inline double exp_q_truncation_point(EntropicIndex q) {
  return q.is_sparse() ? -1.0 / (1.0 - q.value())
                       : -std::numeric_limits<double>::infinity();
}

}  // namespace ftt
