#pragma once

#include <Eigen/Core>

#include "ftt/deformed_math.hpp"
#include "ftt/rng.hpp"

namespace ftt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Univariate q-Gaussian: density exp_q(-(x-mu)^2 / (2 sigma^2)) / Z_q(sigma).
// Sparse (compact support) for q < 1, Gaussian at q = 1, heavy-tailed for
// 1 < q < 3.
struct QGaussian1D {
  EntropicIndex q;
  double mu = 0.0;
  double sigma = 1.0;

  QGaussian1D(EntropicIndex q_, double mu_, double sigma_)
      : q(q_), mu(mu_), sigma(sigma_) {
    if (!(sigma > 0.0)) {
      throw std::invalid_argument("QGaussian1D: sigma must be positive");
    }
  }
};

// Product of independent per-dimension q-Gaussians sharing one entropic
// index (diagonal covariance).
struct QGaussianProduct {
  EntropicIndex q;
  Vector mu;
  Vector sigma;

  QGaussianProduct(EntropicIndex q_, Vector mu_, Vector sigma_);
  Eigen::Index dim() const { return mu.size(); }
};

// Normalization constant Z with integral exp_q(-x^2/(2 sigma^2)) dx = Z.
double normalizer(EntropicIndex q, double sigma);

// Log density; returns -infinity outside the support when q < 1 (a value,
// not an error: callers decide how to treat out-of-support points).
double log_density(const QGaussian1D& d, double x);

// Half-width of the support interval around mu: sigma * sqrt(2/(1-q)) for
// q < 1, +infinity otherwise.
double support_radius(const QGaussian1D& d);

// One draw from the standard (mu = 0, sigma = 1) member via the generalized
// Box-Muller map. The raw GBMM deviate with index q' = (1+q)/(3-q) carries
// scale sqrt((3-q)/2); it is standardized here so the result matches the
// sigma = 1 density above.
double sample_standard(EntropicIndex q, Rng& rng);

// Entry-wise standard draws mapped through mu + sigma (.) z; the result
// always lies in the joint support.
Vector sample(const QGaussianProduct& d, Rng& rng);

// Joint log density: sum of per-dimension terms, -infinity if any dimension
// falls outside its support.
double log_density(const QGaussianProduct& d, const Vector& x);

}  // namespace ftt
