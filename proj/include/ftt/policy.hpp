#pragma once

#include <filesystem>
#include <iosfwd>

#include "ftt/mlp.hpp"
#include "ftt/qgaussian.hpp"

namespace ftt {

// State-conditioned q-Gaussian policy. Mean and log-scale come from two
// separate networks so the mean parameters form a self-contained unit that
// can be copied between policies without touching the scales.
struct QGaussianPolicy {
  EntropicIndex q{1.0};
  Mlp mean_net;
  Mlp logsigma_net;
  double sigma_min = 1e-3;
  double sigma_max = 100.0;

  int state_dim() const { return mean_net.input_dim(); }
  int action_dim() const { return mean_net.output_dim(); }
};

// Both nets fan-in initialized from the given source; architectures are
// state_dim -> hidden^layers -> action_dim.
QGaussianPolicy make_policy(EntropicIndex q, int state_dim, int action_dim,
                            int hidden, int layers, double sigma_min,
                            double sigma_max, Rng& rng);

// The induced action distribution at one state.
QGaussianProduct policy_forward(const QGaussianPolicy& p, const Vector& state);

// Sum of per-dimension log densities; -infinity if any dimension is outside
// the support (q < 1).
double log_prob(const QGaussianPolicy& p, const Vector& state,
                const Vector& action);

Vector sample_action(const QGaussianPolicy& p, const Vector& state, Rng& rng);

// Makes dest's mean parameters bit-identical to source's. Scale networks are
// untouched. Architectures must match.
void copy_mean_parameters(const QGaussianPolicy& source, QGaussianPolicy& dest);

// Per-dimension support interval width 2*sigma(s)*sqrt(2/(1-q)) for q < 1,
// +infinity entries otherwise.
Vector support_width(const QGaussianPolicy& p, const Vector& state);

// ---- Batch machinery used by the loss/gradient computations ----

// Forward pass over a batch of states (row per state) with the caches needed
// to push gradients back through both networks.
struct PolicyEval {
  Matrix mean;        // B x A
  Matrix sigma;       // B x A, clamped to [sigma_min, sigma_max]
  Matrix dsigma_dls;  // B x A, zero where the clamp is active
  Mlp::Cache mean_cache;
  Mlp::Cache logsig_cache;
};
PolicyEval policy_eval_batch(const QGaussianPolicy& p, const Matrix& states);

// Per-sample joint log density of given actions plus the partials with
// respect to mean, sigma, and action. Rows outside support get logp -inf and
// zeroed partials.
struct LogProbParts {
  Vector logp;         // B
  Matrix dlp_dmean;    // B x A
  Matrix dlp_dsigma;   // B x A
  Matrix dlp_daction;  // B x A
};
LogProbParts log_prob_parts(EntropicIndex q, const PolicyEval& eval,
                            const Matrix& actions);

// Chains per-sample mean/sigma gradients (already weighted and batch-scaled)
// back into flat parameter gradients of the two nets.
void policy_backward(const QGaussianPolicy& p, const PolicyEval& eval,
                     const Matrix& dL_dmean, const Matrix& dL_dsigma,
                     Vector& mean_grad, Vector& logsig_grad);

// Standard q-Gaussian noise (B x A) with the policy's index.
Matrix sample_standard_batch(EntropicIndex q, Eigen::Index rows,
                             Eigen::Index cols, Rng& rng);

// Versioned snapshot: header (q, sigma bounds, dims) plus the two networks.
void save_policy(const QGaussianPolicy& p, std::ostream& out);
QGaussianPolicy load_policy(std::istream& in);
void save_policy_file(const QGaussianPolicy& p, const std::filesystem::path& path);
QGaussianPolicy load_policy_file(const std::filesystem::path& path);

}  // namespace ftt
