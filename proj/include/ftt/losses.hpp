#pragma once

#include "ftt/critic.hpp"
#include "ftt/policy.hpp"

namespace ftt {

// q-exponential advantage weighting. With q_w < 1 the weight is exactly zero
// for advantages at or below -tau/(1-q_w), which is what filters bad actions
// out of the proposal update. q_w = 1 is admitted as the plain-exponential
// ablation.
struct AdvantageWeightConfig {
  EntropicIndex q_w{0.0};
  double tau = 0.5;
  double w_max = 100.0;

  AdvantageWeightConfig() = default;
  AdvantageWeightConfig(EntropicIndex q_w_, double tau_, double w_max_)
      : q_w(q_w_), tau(tau_), w_max(w_max_) {
    if (q_w.value() > 1.0) {
      throw std::invalid_argument("AdvantageWeightConfig: q_w must be <= 1");
    }
    if (!(tau > 0.0)) throw std::invalid_argument("AdvantageWeightConfig: tau must be positive");
    if (!(w_max > 0.0)) throw std::invalid_argument("AdvantageWeightConfig: w_max must be positive");
  }
};

double qexp_advantage_weight(double adv, const AdvantageWeightConfig& cfg);

// Flat per-network parameter gradients of a policy loss.
struct PolicyGrads {
  Vector mean;
  Vector logsigma;
};

// Weighted negative log-likelihood of dataset actions under the proposal,
// weights from the critic advantage and treated as constants. Requires an
// infinite-support proposal; a non-finite log-probability is a
// misconfiguration and throws.
double proposal_loss(const QGaussianPolicy& proposal, const Critic& critic,
                     const Matrix& states, const Matrix& actions,
                     const AdvantageWeightConfig& cfg,
                     PolicyGrads* grads = nullptr);

// Low-variance KL estimator between actor and proposal: mean of
// r - 1 - ln r with r = proposal density / actor density at actions drawn
// from the actor. Every term is >= 0. In the default (non-pathwise) form the
// sampled actions are constants and gradients flow only through the density
// evaluations.
double actor_kl_loss_at(const QGaussianPolicy& actor,
                        const QGaussianPolicy& proposal, const Matrix& states,
                        const Matrix& sampled_actions,
                        PolicyGrads* actor_grads = nullptr);

// Reparameterized variant: actions are mean + sigma (.) noise with the noise
// held fixed, and gradients additionally flow along the sample path.
double actor_kl_loss_pathwise(const QGaussianPolicy& actor,
                              const QGaussianPolicy& proposal,
                              const Matrix& states, const Matrix& noise,
                              PolicyGrads* actor_grads = nullptr);

// Draws one action per state from the actor, then evaluates the estimator.
double actor_kl_loss(const QGaussianPolicy& actor,
                     const QGaussianPolicy& proposal, const Matrix& states,
                     Rng& rng, bool pathwise = false,
                     PolicyGrads* actor_grads = nullptr);

// Plain negative log-likelihood of dataset actions. Returns +infinity when
// any action falls outside a sparse policy's support; that value is the
// documented failure mode and is never masked. No gradients are produced for
// a non-finite batch.
double forward_kl_loss(const QGaussianPolicy& policy, const Matrix& states,
                       const Matrix& actions, PolicyGrads* grads = nullptr);

// Reverse KL against a fitted behavior density at actions drawn from the
// policy itself (always finite for sparse policies: samples are
// self-supported, the behavior model has infinite support).
double reverse_kl_loss_at(const QGaussianPolicy& policy,
                          const QGaussianPolicy& behavior, const Matrix& states,
                          const Matrix& sampled_actions,
                          PolicyGrads* grads = nullptr);
double reverse_kl_loss(const QGaussianPolicy& policy,
                       const QGaussianPolicy& behavior, const Matrix& states,
                       Rng& rng, PolicyGrads* grads = nullptr);

// Random action replacement: an in-support action passes through untouched;
// an out-of-support one is replaced by the nearest (L2) of K samples from
// the policy.
Vector rar_replace(const Vector& action, const QGaussianPolicy& policy,
                   const Vector& state, int k, Rng& rng);

// SPOT objective: -Q(s, a) - alpha * ln pi_D(a|s) at reparameterized actor
// samples a = mean + sigma (.) noise (noise fixed). Gradients reach the
// actor through the sample path; the critic and behavior model stay frozen.
double spot_actor_loss_at(const QGaussianPolicy& actor, const Critic& critic,
                          const QGaussianPolicy& behavior, const Matrix& states,
                          double alpha, const Matrix& noise,
                          PolicyGrads* actor_grads = nullptr);
double spot_actor_loss(const QGaussianPolicy& actor, const Critic& critic,
                       const QGaussianPolicy& behavior, const Matrix& states,
                       double alpha, Rng& rng,
                       PolicyGrads* actor_grads = nullptr);

// Gaussian density surrogate for the unknown behavior policy, fitted by
// maximum likelihood on the dataset's (s, a) pairs.
struct BehaviorFitConfig {
  int hidden = 64;
  int layers = 2;
  long steps = 3000;
  int batch_size = 256;
  double lr = 1e-3;
  double sigma_min = 1e-3;
  double sigma_max = 100.0;
};

QGaussianPolicy fit_behavior_model(const OfflineDataset& dataset,
                                   const BehaviorFitConfig& cfg, Rng& rng,
                                   std::vector<double>* nll_history = nullptr);

}  // namespace ftt
