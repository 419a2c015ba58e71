#pragma once

#include "ftt/dataset.hpp"
#include "ftt/policy.hpp"
#include "ftt/rng.hpp"

namespace ftt {

// Fixed-horizon continuous-treatment simulator: 8 latent means evolve by a
// tanh response to the dose, observations are the means plus isotropic
// Gaussian noise, and the reward trades the pro-dose components (dims 1-4)
// against the anti-dose ones (dims 5-8). Episodes end only by horizon
// (timeout), never by a terminal state.
struct TreatmentEnvConfig {
  double noise_scale = 0.05;  // observation std; covariance noise_scale^2 * I
  long horizon = 24;
  double action_low = -100.0;   // behavior-policy dose range
  double action_high = 100.0;
  enum class InitScheme { kZero, kUniform } init = InitScheme::kZero;
  std::uint64_t seed = 0;
};

inline constexpr int kTreatmentStateDim = 8;

struct EnvState {
  Vector mu;  // latent means, each in (-1, 1) after the first step
  long t = 0;
};

// Deterministic part of the dynamics: dims 0-3 get tanh(a/100 + mu_j),
// dims 4-7 get tanh(-a/100 + mu_j).
Vector transition_mean(const Vector& mu, double a);

// Reward evaluated on the noisy next observation.
double reward_from_observation(const Vector& s_next);

struct StepResult {
  Vector observation;
  double reward = 0.0;
  bool timeout = false;
};

class TreatmentEnv {
 public:
  explicit TreatmentEnv(TreatmentEnvConfig cfg) : cfg_(cfg) {}

  const TreatmentEnvConfig& config() const { return cfg_; }

  // Starts an episode and returns the initial observation (a noisy draw
  // around the initial latent mean).
  Vector reset(Rng& rng);

  // Advances one step; rejects stepping a finished episode.
  StepResult step(double a, Rng& rng);

  const EnvState& state() const { return state_; }
  bool done() const { return state_.t >= cfg_.horizon; }

 private:
  TreatmentEnvConfig cfg_;
  EnvState state_;
  bool started_ = false;
};

// Rolls out `episodes` full-horizon episodes with doses drawn uniformly from
// (action_low, action_high), recording every transition. Deterministic given
// cfg.seed.
OfflineDataset generate_dataset(const TreatmentEnvConfig& cfg, long episodes);

struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;  // sample std over episodes; 0 when episodes == 1
  std::vector<double> returns;
};

// Undiscounted return of the policy, sampling actions stochastically.
EvalResult evaluate_policy(const QGaussianPolicy& policy,
                           const TreatmentEnvConfig& cfg, long episodes,
                           Rng& rng);

}  // namespace ftt
